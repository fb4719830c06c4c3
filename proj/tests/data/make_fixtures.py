"""Regenerates the image fixtures in this directory.

coffee.png (CC0, Rachel Michetti) and rocket.jpg (public domain, SpaceX) ship
with scikit-image. Both are reduced to 600x338, the size used by the runtime
check.
"""
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

HERE = Path(__file__).resolve().parent


def center_crop(img: Image.Image, width: int, height: int) -> Image.Image:
    scale = max(width / img.width, height / img.height)
    resized = img.resize((round(img.width * scale), round(img.height * scale)),
                         Image.LANCZOS)
    left = (resized.width - width) // 2
    top = (resized.height - height) // 2
    return resized.crop((left, top, left + width, top + height))


def channel_mean(rgb: np.ndarray) -> np.ndarray:
    return np.rint(rgb.astype(np.float64).mean(axis=2)).astype(np.uint8)


def write_pgm(path: Path, gray: np.ndarray) -> None:
    h, w = gray.shape
    path.write_bytes(f"P5\n{w} {h}\n255\n".encode() + gray.tobytes())


def main() -> None:
    coffee = center_crop(Image.fromarray(data.coffee()), 600, 338)
    write_pgm(HERE / "coffee_600x338.pgm", channel_mean(np.asarray(coffee)))

    rocket = center_crop(Image.fromarray(data.rocket()), 600, 338)
    rocket.save(HERE / "rocket_600x338.png", optimize=True)

    gray = np.array([[0, 255], [128, 64]], dtype=np.uint8)
    Image.fromarray(gray, mode="L").save(HERE / "gray_2x2.png")

    rgb = np.array([[[30, 60, 90], [255, 0, 0]]], dtype=np.uint8)
    Image.fromarray(rgb, mode="RGB").save(HERE / "rgb_2x1.png")


if __name__ == "__main__":
    main()
