import numpy as np
import pytest
from PIL import Image

FIXTURE_NAMES = (
    "MEN_Denim_0000001.jpg",
    "MEN_Tees_0000002.png",
    "WOMEN_Skirt_0000003.jpg",
    "WOMEN_Dress_0000004.png",
    "WOMEN_Cardigan_0000005.jpg",
)


def random_image(rng, size=(300, 260)):
    data = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
    return Image.fromarray(data, mode="RGB")


@pytest.fixture(scope="session")
def image_dir(tmp_path_factory):
    """Five canonically named random images."""
    root = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(8)
    for name in FIXTURE_NAMES:
        random_image(rng).save(root / name)
    return root
