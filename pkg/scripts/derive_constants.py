#!/usr/bin/env python
"""Regenerate the frozen exponent tables in setgrowth.constants.

Runs the word-exponent fixpoint from scratch and prints every aggregate the
library freezes, so the literals can be compared (tests do the same
comparison automatically).
"""

from __future__ import annotations

import argparse
from collections import Counter
from itertools import product


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=8)
    args = ap.parse_args()

    from setgrowth.constants import derive_word_exponents

    exps = derive_word_exponents(args.max_len)

    print(f"# word exponents up to length {args.max_len}")
    chain = {}
    for n in range(1, args.max_len + 1):
        vals = [e for w, e in exps.items() if len(w) <= n]
        chain[n] = max(vals)
    print(f"chain maxima c(n): {chain}")

    pos = {}
    for n in range(1, args.max_len + 1):
        pos[n] = exps[(1,) * n]
    print(f"positive powers E(+^n): {pos}")

    hist = Counter({0: 1})  # empty word
    for w, e in exps.items():
        if len(w) <= 7:
            hist[e] += 1
    print(f"cover histogram (len <= 7 plus empty): {dict(sorted(hist.items()))}")
    total = sum(hist.values())
    print(f"word count (should be 2 + 2^2 + ... + 2^7 + 1 = 255): {total}")

    print("# spot values")
    for w in [(1, -1), (1, 1, -1), (1, -1, 1), (1, 1, 1, 1), (-1, 1, 1, 1),
              (1, 1, 1, 1, 1), (1, -1, -1, 1)]:
        print(f"E{w} = {exps[w]}")


if __name__ == "__main__":
    main()
