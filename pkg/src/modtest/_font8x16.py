"""Bundled 8x16 bitmap glyphs for printable ASCII (0x20-0x7e).

Generated by tools/make_font_table.py; do not edit by hand.
"""

CELL_W = 8
CELL_H = 16

# codepoint -> 16 row bytes, MSB = leftmost pixel
GLYPHS = {
    32: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    33: (0x00, 0x00, 0x00, 0x18, 0x18, 0x18, 0x18, 0x18, 0x10, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    34: (0x00, 0x00, 0x00, 0x24, 0x24, 0x24, 0x24, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    35: (0x00, 0x00, 0x12, 0x12, 0x14, 0x7f, 0x24, 0x24, 0xfe, 0x28, 0x48, 0x48, 0x00, 0x00, 0x00, 0x00),
    36: (0x00, 0x00, 0x00, 0x00, 0x3c, 0x60, 0x40, 0x38, 0x0c, 0x02, 0x42, 0x3c, 0x00, 0x00, 0x00, 0x00),
    37: (0x00, 0x00, 0x00, 0x60, 0x90, 0x90, 0x66, 0x18, 0x4e, 0x0b, 0x0b, 0x0e, 0x00, 0x00, 0x00, 0x00),
    38: (0x00, 0x00, 0x00, 0x3c, 0x20, 0x20, 0x30, 0x51, 0xc8, 0xc6, 0x46, 0x3a, 0x00, 0x00, 0x00, 0x00),
    39: (0x00, 0x00, 0x00, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    40: (0x00, 0x08, 0x08, 0x18, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x18, 0x08, 0x08, 0x00, 0x00, 0x00),
    41: (0x00, 0x20, 0x10, 0x10, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x10, 0x10, 0x20, 0x00, 0x00, 0x00),
    42: (0x00, 0x00, 0x00, 0x00, 0x40, 0x38, 0x38, 0x40, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    43: (0x00, 0x00, 0x00, 0x00, 0x10, 0x10, 0x10, 0x7e, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00),
    44: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x10, 0x10, 0x00, 0x00),
    45: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    46: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    47: (0x00, 0x00, 0x00, 0x06, 0x04, 0x04, 0x08, 0x08, 0x10, 0x10, 0x20, 0x20, 0x60, 0x40, 0x00, 0x00),
    48: (0x00, 0x00, 0x00, 0x3c, 0x64, 0x46, 0x42, 0x5a, 0x42, 0x46, 0x64, 0x3c, 0x00, 0x00, 0x00, 0x00),
    49: (0x00, 0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x3e, 0x00, 0x00, 0x00, 0x00),
    50: (0x00, 0x00, 0x00, 0x38, 0x44, 0x06, 0x04, 0x0c, 0x18, 0x30, 0x60, 0x7e, 0x00, 0x00, 0x00, 0x00),
    51: (0x00, 0x00, 0x00, 0x38, 0x44, 0x06, 0x04, 0x3c, 0x04, 0x02, 0x46, 0x3c, 0x00, 0x00, 0x00, 0x00),
    52: (0x00, 0x00, 0x00, 0x0c, 0x1c, 0x14, 0x24, 0x24, 0x44, 0x7e, 0x04, 0x04, 0x00, 0x00, 0x00, 0x00),
    53: (0x00, 0x00, 0x00, 0x7c, 0x40, 0x40, 0x78, 0x04, 0x06, 0x06, 0x44, 0x38, 0x00, 0x00, 0x00, 0x00),
    54: (0x00, 0x00, 0x00, 0x1c, 0x20, 0x40, 0x5c, 0x66, 0x42, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00),
    55: (0x00, 0x00, 0x00, 0x7e, 0x04, 0x04, 0x0c, 0x08, 0x08, 0x10, 0x10, 0x30, 0x00, 0x00, 0x00, 0x00),
    56: (0x00, 0x00, 0x00, 0x3c, 0x66, 0x46, 0x64, 0x3c, 0x66, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00),
    57: (0x00, 0x00, 0x00, 0x3c, 0x64, 0x46, 0x46, 0x66, 0x3e, 0x06, 0x04, 0x38, 0x00, 0x00, 0x00, 0x00),
    58: (0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    59: (0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x00, 0x18, 0x18, 0x10, 0x10, 0x00, 0x00),
    60: (0x00, 0x00, 0x00, 0x00, 0x00, 0x02, 0x1c, 0x60, 0x60, 0x1c, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00),
    61: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x7e, 0x00, 0x00, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    62: (0x00, 0x00, 0x00, 0x00, 0x00, 0x40, 0x38, 0x06, 0x06, 0x38, 0x40, 0x00, 0x00, 0x00, 0x00, 0x00),
    63: (0x00, 0x00, 0x00, 0x3c, 0x04, 0x04, 0x0c, 0x18, 0x10, 0x00, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00),
    64: (0x00, 0x00, 0x00, 0x1c, 0x62, 0x42, 0x8e, 0x92, 0x90, 0x92, 0x8e, 0x40, 0x20, 0x1c, 0x00, 0x00),
    65: (0x00, 0x00, 0x00, 0x18, 0x18, 0x38, 0x24, 0x24, 0x64, 0x7e, 0x42, 0xc2, 0x00, 0x00, 0x00, 0x00),
    66: (0x00, 0x00, 0x00, 0x7c, 0x46, 0x42, 0x46, 0x7c, 0x46, 0x42, 0x46, 0x7c, 0x00, 0x00, 0x00, 0x00),
    67: (0x00, 0x00, 0x00, 0x1c, 0x22, 0x60, 0x40, 0x40, 0x40, 0x60, 0x22, 0x1c, 0x00, 0x00, 0x00, 0x00),
    68: (0x00, 0x00, 0x00, 0x78, 0x44, 0x46, 0x42, 0x42, 0x42, 0x46, 0x44, 0x78, 0x00, 0x00, 0x00, 0x00),
    69: (0x00, 0x00, 0x00, 0x7e, 0x60, 0x60, 0x60, 0x7e, 0x60, 0x60, 0x60, 0x7e, 0x00, 0x00, 0x00, 0x00),
    70: (0x00, 0x00, 0x00, 0x7e, 0x60, 0x60, 0x60, 0x7e, 0x60, 0x60, 0x60, 0x60, 0x00, 0x00, 0x00, 0x00),
    71: (0x00, 0x00, 0x00, 0x1c, 0x60, 0x40, 0x40, 0x4e, 0x42, 0x42, 0x62, 0x3c, 0x00, 0x00, 0x00, 0x00),
    72: (0x00, 0x00, 0x00, 0x42, 0x42, 0x42, 0x42, 0x7e, 0x42, 0x42, 0x42, 0x42, 0x00, 0x00, 0x00, 0x00),
    73: (0x00, 0x00, 0x00, 0x7e, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7e, 0x00, 0x00, 0x00, 0x00),
    74: (0x00, 0x00, 0x00, 0x3c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04, 0x4c, 0x78, 0x00, 0x00, 0x00, 0x00),
    75: (0x00, 0x00, 0x00, 0x42, 0x44, 0x48, 0x70, 0x78, 0x48, 0x44, 0x46, 0x42, 0x00, 0x00, 0x00, 0x00),
    76: (0x00, 0x00, 0x00, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x7e, 0x00, 0x00, 0x00, 0x00),
    77: (0x00, 0x00, 0x00, 0x46, 0x66, 0x66, 0x4a, 0x5a, 0x5a, 0x42, 0x42, 0x42, 0x00, 0x00, 0x00, 0x00),
    78: (0x00, 0x00, 0x00, 0x62, 0x62, 0x72, 0x52, 0x52, 0x4a, 0x4e, 0x46, 0x46, 0x00, 0x00, 0x00, 0x00),
    79: (0x00, 0x00, 0x00, 0x3c, 0x64, 0x42, 0x42, 0x42, 0x42, 0x42, 0x64, 0x3c, 0x00, 0x00, 0x00, 0x00),
    80: (0x00, 0x00, 0x00, 0x7c, 0x66, 0x62, 0x62, 0x66, 0x7c, 0x60, 0x60, 0x60, 0x00, 0x00, 0x00, 0x00),
    81: (0x00, 0x00, 0x00, 0x3c, 0x64, 0x42, 0x42, 0x42, 0x42, 0x42, 0x64, 0x3c, 0x04, 0x04, 0x00, 0x00),
    82: (0x00, 0x00, 0x00, 0x7c, 0x46, 0x46, 0x44, 0x78, 0x44, 0x46, 0x42, 0x43, 0x00, 0x00, 0x00, 0x00),
    83: (0x00, 0x00, 0x00, 0x3c, 0x60, 0x40, 0x60, 0x3c, 0x06, 0x02, 0x46, 0x3c, 0x00, 0x00, 0x00, 0x00),
    84: (0x00, 0x00, 0x00, 0xff, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    85: (0x00, 0x00, 0x00, 0x42, 0x42, 0x42, 0x42, 0x42, 0x42, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00),
    86: (0x00, 0x00, 0x00, 0x42, 0x42, 0x46, 0x64, 0x24, 0x24, 0x28, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    87: (0x00, 0x00, 0x00, 0x81, 0x83, 0xc2, 0x5a, 0x5a, 0x5a, 0x66, 0x66, 0x64, 0x00, 0x00, 0x00, 0x00),
    88: (0x00, 0x00, 0x00, 0x42, 0x24, 0x24, 0x18, 0x18, 0x38, 0x24, 0x46, 0xc2, 0x00, 0x00, 0x00, 0x00),
    89: (0x00, 0x00, 0x00, 0x42, 0x46, 0x24, 0x38, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    90: (0x00, 0x00, 0x00, 0x7e, 0x06, 0x04, 0x08, 0x18, 0x10, 0x20, 0x60, 0x7e, 0x00, 0x00, 0x00, 0x00),
    91: (0x00, 0x1c, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1c, 0x00, 0x00, 0x00),
    92: (0x00, 0x00, 0x00, 0x40, 0x60, 0x20, 0x20, 0x10, 0x10, 0x08, 0x08, 0x04, 0x04, 0x06, 0x00, 0x00),
    93: (0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x38, 0x00, 0x00, 0x00),
    94: (0x00, 0x00, 0x00, 0x18, 0x3c, 0x24, 0x42, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    95: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xff, 0x00),
    96: (0x00, 0x00, 0x20, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
    97: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3c, 0x44, 0x02, 0x3e, 0x46, 0x46, 0x3e, 0x00, 0x00, 0x00, 0x00),
    98: (0x00, 0x40, 0x40, 0x40, 0x40, 0x7c, 0x66, 0x62, 0x42, 0x62, 0x66, 0x7c, 0x00, 0x00, 0x00, 0x00),
    99: (0x00, 0x00, 0x00, 0x00, 0x00, 0x1c, 0x20, 0x60, 0x60, 0x60, 0x20, 0x1c, 0x00, 0x00, 0x00, 0x00),
    100: (0x00, 0x06, 0x06, 0x06, 0x06, 0x3e, 0x66, 0x46, 0x46, 0x46, 0x66, 0x3e, 0x00, 0x00, 0x00, 0x00),
    101: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x42, 0x7e, 0x40, 0x62, 0x3c, 0x00, 0x00, 0x00, 0x00),
    102: (0x00, 0x0e, 0x18, 0x10, 0x10, 0x7e, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00),
    103: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3e, 0x66, 0x46, 0x46, 0x46, 0x66, 0x3e, 0x04, 0x04, 0x38, 0x00),
    104: (0x00, 0x40, 0x40, 0x40, 0x40, 0x7c, 0x64, 0x46, 0x46, 0x46, 0x46, 0x46, 0x00, 0x00, 0x00, 0x00),
    105: (0x00, 0x18, 0x00, 0x00, 0x00, 0x38, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7e, 0x00, 0x00, 0x00, 0x00),
    106: (0x00, 0x08, 0x00, 0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x18, 0x70, 0x00),
    107: (0x00, 0x60, 0x60, 0x60, 0x60, 0x66, 0x6c, 0x78, 0x78, 0x6c, 0x66, 0x62, 0x00, 0x00, 0x00, 0x00),
    108: (0x00, 0x70, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x0e, 0x00, 0x00, 0x00, 0x00),
    109: (0x00, 0x00, 0x00, 0x00, 0x00, 0x76, 0x5a, 0x52, 0x52, 0x52, 0x52, 0x52, 0x00, 0x00, 0x00, 0x00),
    110: (0x00, 0x00, 0x00, 0x00, 0x00, 0x7c, 0x64, 0x46, 0x46, 0x46, 0x46, 0x46, 0x00, 0x00, 0x00, 0x00),
    111: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3c, 0x64, 0x42, 0x42, 0x42, 0x64, 0x3c, 0x00, 0x00, 0x00, 0x00),
    112: (0x00, 0x00, 0x00, 0x00, 0x00, 0x7c, 0x66, 0x62, 0x42, 0x62, 0x66, 0x7c, 0x40, 0x40, 0x40, 0x00),
    113: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3e, 0x66, 0x46, 0x46, 0x46, 0x66, 0x3e, 0x02, 0x02, 0x02, 0x00),
    114: (0x00, 0x00, 0x00, 0x00, 0x00, 0x3e, 0x30, 0x30, 0x20, 0x20, 0x20, 0x20, 0x00, 0x00, 0x00, 0x00),
    115: (0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x64, 0x60, 0x3c, 0x04, 0x44, 0x3c, 0x00, 0x00, 0x00, 0x00),
    116: (0x00, 0x00, 0x00, 0x10, 0x10, 0x7e, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1e, 0x00, 0x00, 0x00, 0x00),
    117: (0x00, 0x00, 0x00, 0x00, 0x00, 0x46, 0x46, 0x46, 0x46, 0x46, 0x66, 0x3e, 0x00, 0x00, 0x00, 0x00),
    118: (0x00, 0x00, 0x00, 0x00, 0x00, 0x42, 0x46, 0x24, 0x24, 0x2c, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00),
    119: (0x00, 0x00, 0x00, 0x00, 0x00, 0x81, 0x82, 0x5a, 0x5a, 0x5a, 0x66, 0x24, 0x00, 0x00, 0x00, 0x00),
    120: (0x00, 0x00, 0x00, 0x00, 0x00, 0x46, 0x24, 0x18, 0x18, 0x38, 0x24, 0x42, 0x00, 0x00, 0x00, 0x00),
    121: (0x00, 0x00, 0x00, 0x00, 0x00, 0x42, 0x42, 0x24, 0x24, 0x3c, 0x18, 0x18, 0x10, 0x10, 0x60, 0x00),
    122: (0x00, 0x00, 0x00, 0x00, 0x00, 0x7e, 0x04, 0x08, 0x18, 0x30, 0x20, 0x7e, 0x00, 0x00, 0x00, 0x00),
    123: (0x00, 0x0c, 0x18, 0x18, 0x18, 0x10, 0x70, 0x10, 0x18, 0x18, 0x18, 0x18, 0x0c, 0x00, 0x00, 0x00),
    124: (0x00, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00),
    125: (0x00, 0x70, 0x10, 0x10, 0x10, 0x18, 0x0c, 0x18, 0x18, 0x10, 0x10, 0x10, 0x70, 0x00, 0x00, 0x00),
    126: (0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x70, 0x0e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00),
}
