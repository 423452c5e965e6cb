"""Rasterize lowercase Latin glyphs into the plain pattern format.

Run once to (re)build tests/fixtures/glyphs; the package itself never
renders fonts. Needs Pillow and the DejaVu fonts bundled with matplotlib.

    python scripts/make_glyph_pack.py --out tests/fixtures/glyphs
"""

import argparse
import string
from pathlib import Path

import matplotlib
import numpy as np
from PIL import Image, ImageDraw, ImageFont

from fuzzcut.raster import GrayImage, binarize, otsu_threshold, trim, write_pattern

FONTS = {
    "sans": "DejaVuSans.ttf",
    "serif": "DejaVuSerif.ttf",
    "sansbold": "DejaVuSans-Bold.ttf",
}
SIZES = (24, 32)


def render(ch, font):
    left, top, right, bottom = font.getbbox(ch)
    img = Image.new("L", (right - left + 8, bottom - top + 8), 255)
    ImageDraw.Draw(img).text((4 - left, 4 - top), ch, font=font, fill=0)
    gray = GrayImage(np.asarray(img))
    return trim(binarize(gray, otsu_threshold(gray)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="tests/fixtures/glyphs")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    font_dir = Path(matplotlib.get_data_path()) / "fonts" / "ttf"
    count = 0
    for tag, fname in FONTS.items():
        for size in SIZES:
            font = ImageFont.truetype(str(font_dir / fname), size)
            for ch in string.ascii_lowercase:
                write_pattern(render(ch, font), out / f"{ch}__{tag}{size}.txt")
                count += 1
    print(f"wrote {count} glyphs to {out}")


if __name__ == "__main__":
    main()
