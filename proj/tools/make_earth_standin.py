#!/usr/bin/env python3
"""Build an Earth-topography test map on the MW grid from a tinted relief image.

The image is an equirectangular colour rendering of global relief (north up,
longitude -180 at the left edge).  Colours are mapped back to an approximate
elevation through the colour table below, the result is low-passed to the
target grid and sampled at the MW nodes.  The output is an SSMAP1 file of
real samples (kind 0); `sphere-sparse convert --to harmonic --lmax <L>` turns
it into truncated harmonic coefficients.

    python3 tools/make_earth_standin.py etopo1.jpg earth_samples.ssmap --L 256
"""
import argparse
import struct

import numpy as np
from PIL import Image
from scipy import ndimage

# Approximate elevation (m) -> RGB colour table for the relief tint.
PALETTE = [
    (-8000, (10, 0, 121)),
    (-7000, (26, 0, 137)),
    (-6000, (16, 6, 180)),
    (-5000, (0, 14, 203)),
    (-4500, (0, 39, 223)),
    (-4000, (0, 63, 242)),
    (-3500, (0, 80, 255)),
    (-3000, (0, 101, 255)),
    (-2500, (27, 122, 255)),
    (-2000, (45, 143, 255)),
    (-1500, (62, 164, 255)),
    (-1000, (90, 185, 255)),
    (-500, (121, 206, 255)),
    (-200, (141, 217, 255)),
    (-50, (170, 231, 255)),
    (0, (51, 102, 0)),
    (100, (51, 204, 102)),
    (200, (187, 228, 146)),
    (500, (255, 220, 185)),
    (1000, (243, 202, 137)),
    (1500, (230, 184, 88)),
    (2000, (217, 166, 39)),
    (2500, (168, 154, 31)),
    (3000, (164, 144, 25)),
    (3500, (162, 134, 19)),
    (4000, (159, 123, 13)),
    (4500, (156, 113, 7)),
    (5000, (153, 102, 0)),
    (5500, (162, 89, 89)),
    (6000, (178, 118, 118)),
]

# Ice sheets are rendered white to light grey whatever their height.
ICE = [(2500, (255, 255, 255)), (2500, (235, 238, 242)), (2000, (215, 222, 230))]


def palette_table(steps_per_segment=20):
    """Colour table densified by linear interpolation between control points."""
    heights, colours = [], []
    for (h0, c0), (h1, c1) in zip(PALETTE[:-1], PALETTE[1:]):
        # No blending across the coastline: shallow water and lowland differ.
        if h0 < 0 <= h1:
            heights.append(h0)
            colours.append(c0)
            continue
        for s in np.linspace(0.0, 1.0, steps_per_segment, endpoint=False):
            heights.append(h0 + s * (h1 - h0))
            colours.append(tuple((1 - s) * a + s * b for a, b in zip(c0, c1)))
    heights.append(PALETTE[-1][0])
    colours.append(PALETTE[-1][1])
    for h, c in ICE:
        heights.append(h)
        colours.append(c)
    return np.array(heights), np.array(colours, dtype=float)


def elevation_from_image(path, width):
    img = Image.open(path).convert("RGB")
    img = img.resize((width, width // 2), Image.LANCZOS)
    rgb = np.asarray(img, dtype=float).reshape(-1, 3)
    heights, colours = palette_table()
    # Nearest table colour; chunks keep the distance matrix small.
    out = np.empty(rgb.shape[0])
    for i in range(0, rgb.shape[0], 65536):
        block = rgb[i:i + 65536]
        d = ((block[:, None, :] - colours[None, :, :]) ** 2).sum(axis=2)
        out[i:i + 65536] = heights[d.argmin(axis=1)]
    # Hill shading perturbs single pixels; a small median removes the speckle.
    return ndimage.median_filter(out.reshape(width // 2, width), size=3, mode="wrap")


def sample_mw(elev, L):
    rows, cols = elev.shape
    t = np.arange(L)
    p = np.arange(2 * L - 1)
    theta = (2 * t + 1) * np.pi / (2 * L - 1)
    phi = 2 * np.pi * p / (2 * L - 1)
    # Pixel centres: row r at colatitude (r + 0.5) pi / rows, column c at
    # longitude -pi + (c + 0.5) 2 pi / cols.
    r = theta / np.pi * rows - 0.5
    lon = np.where(phi > np.pi, phi - 2 * np.pi, phi)
    c = (lon + np.pi) / (2 * np.pi) * cols - 0.5
    rr, cc = np.meshgrid(r, c, indexing="ij")
    # Pad with wrapped columns so interpolation is periodic in longitude.
    padded = np.concatenate([elev[:, -2:], elev, elev[:, :2]], axis=1)
    return ndimage.map_coordinates(padded, [rr, cc + 2], order=1, mode="nearest")


def write_ssmap(path, L, samples):
    with open(path, "wb") as f:
        f.write(b"SSMAP1")
        f.write(struct.pack("<III", L, 0, 1))
        f.write(np.ascontiguousarray(samples, dtype="<f8").tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("image")
    ap.add_argument("output")
    ap.add_argument("--L", type=int, default=256)
    ap.add_argument("--scale", type=float, default=1e-3, help="metres to output units")
    args = ap.parse_args()
    elev = elevation_from_image(args.image, width=4 * (2 * args.L - 1))
    samples = sample_mw(elev, args.L) * args.scale
    write_ssmap(args.output, args.L, samples)
    print(f"wrote {args.output}: L={args.L}, range [{samples.min():.3f}, {samples.max():.3f}]")


if __name__ == "__main__":
    main()
