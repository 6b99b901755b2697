"""Regenerate the bundled 8x16 ASCII bitmap table from DejaVu Sans Mono.

Run from the repo root: python3 tools/make_font_table.py
Writes src/modtest/_font8x16.py. The output is committed so the package
has no font-file dependency at runtime.
"""

import os

import matplotlib
from PIL import Image, ImageDraw, ImageFont

CELL_W, CELL_H = 8, 16
POINT_SIZE = 13

def render_cell(font, ch):
    img = Image.new("L", (CELL_W * 3, CELL_H * 3), 0)
    draw = ImageDraw.Draw(img)
    draw.text((CELL_W, CELL_H), ch, font=font, fill=255, anchor="ls")
    # anchor "ls": baseline-left at (CELL_W, CELL_H); crop cell around it
    cell = img.crop((CELL_W, CELL_H - 12, CELL_W * 2, CELL_H - 12 + CELL_H))
    rows = []
    for y in range(CELL_H):
        byte = 0
        for x in range(CELL_W):
            if cell.getpixel((x, y)) >= 128:
                byte |= 1 << (7 - x)
        rows.append(byte)
    return rows

def main():
    ttf = os.path.join(os.path.dirname(matplotlib.__file__),
                       "mpl-data", "fonts", "ttf", "DejaVuSansMono.ttf")
    font = ImageFont.truetype(ttf, POINT_SIZE)
    lines = [
        '"""Bundled 8x16 bitmap glyphs for printable ASCII (0x20-0x7e).',
        "",
        "Generated by tools/make_font_table.py; do not edit by hand.",
        '"""',
        "",
        "CELL_W = 8",
        "CELL_H = 16",
        "",
        "# codepoint -> 16 row bytes, MSB = leftmost pixel",
        "GLYPHS = {",
    ]
    for cp in range(0x20, 0x7F):
        rows = render_cell(font, chr(cp))
        lines.append(f"    {cp}: ({', '.join(f'0x{b:02x}' for b in rows)}),")
    lines.append("}")
    out = os.path.join(os.path.dirname(__file__), "..", "src", "modtest", "_font8x16.py")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("wrote", os.path.normpath(out))

if __name__ == "__main__":
    main()
