"""Shared fixtures: small in-memory stores so tests avoid disk and stay fast."""

import numpy as np
import pytest

from handgate import captcha, imaging, synthdata


def build_stores(seed=0, hand_size=(200, 200), n_bg=3, n_classes=6, n_fakes=14):
    rng = imaging.make_rng(seed)
    backgrounds = {
        f"bg{i}": [synthdata.make_background(rng)] for i in range(n_bg)
    }
    genuine = {}
    for i in range(n_classes):
        params = synthdata.subject_params(1000 + i)
        genuine[f"class{i}"] = [
            synthdata.render_hand(params, rng, hand_size, with_wrist=False),
            synthdata.render_hand(params, rng, hand_size, with_wrist=False),
        ]
    fakes = {
        f"fake{i}": [synthdata.make_fake_image(rng, hand_size)]
        for i in range(n_fakes)
    }
    return {
        "background": captcha.ImageStore.in_memory("background", backgrounds),
        "genuine": captcha.ImageStore.in_memory("genuine", genuine),
        "fake": captcha.ImageStore.in_memory("fake", fakes),
    }


@pytest.fixture(scope="session")
def stores():
    return build_stores()


@pytest.fixture(scope="session")
def small_spec():
    """Reduced-cost spec for tests that generate many challenges."""
    return captcha.ChallengeSpec(
        canvas=(240, 240),
        shapes_per_kind=25,
        hand_size_range=(50, 75),
    )
