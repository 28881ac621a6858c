#!/usr/bin/env python3
"""Regenerate the complex erfc reference tables with mpmath.

Each record: `re_in im_in re_out im_out`, 20 significant digits.
Inputs are written exactly (they are doubles); outputs are evaluated at
50 decimal digits from the exact double inputs.
"""
import mpmath as mp

mp.mp.dps = 50


def fmt(v):
    if v == 0:
        return "0.0000000000000000000e+00"
    return mp.nstr(mp.mpf(v), 20, strip_zeros=False, min_fixed=1, max_fixed=0)


def record(x, y):
    z = mp.mpc(mp.mpf(x), mp.mpf(y))
    w = mp.erfc(z)
    if y == 0:
        w = mp.mpc(mp.re(w), 0)
    return f"{fmt(x)} {fmt(y)} {fmt(mp.re(w))} {fmt(mp.im(w))}"


def main():
    with open("erfc_grid.txt", "w") as out:
        for i in range(101):
            x = -20.0 + 0.4 * i
            for j in range(101):
                y = -20.0 + 0.4 * j
                out.write(record(x, y) + "\n")
    with open("erfc_real.txt", "w") as out:
        for i in range(461):
            x = -20.0 + 0.1 * i
            out.write(record(x, 0.0) + "\n")


if __name__ == "__main__":
    main()
