"""Brute-force recount of the eval fixture pairs.

Re-derives every per-class count from the JSON files with its own
normalization code and checks it against expected.json. Exits non-zero on
any disagreement.
"""
import json
import math
import sys
from pathlib import Path


def props(doc):
    hp = doc.get("hyperparams", doc) if "class" in doc else doc
    return hp["allOf"][0].get("properties", {}), hp["allOf"][1:]


def canon(x):
    return json.dumps(x, sort_keys=True)


def proj(s):
    out = {}
    if "type" in s:
        out["type"] = s["type"]
    if "enum" in s:
        out["enum"] = sorted(s["enum"], key=canon)
    for k in ("laleType",):
        if k in s:
            out[k] = s[k]
    if "not" in s:
        out["not"] = proj(s["not"])
    if "anyOf" in s:
        members, enums = [], []
        todo = list(s["anyOf"])
        while todo:
            m = proj(todo.pop(0))
            if list(m) == ["anyOf"]:
                members.extend(m["anyOf"])
            elif list(m) == ["enum"]:
                enums.extend(m["enum"])
            else:
                members.append(m)
        if enums:
            members.append({"enum": sorted({canon(v): v for v in enums}.values(), key=canon)})
        members = sorted({canon(m): m for m in members}.values(), key=canon)
        if len(members) == 1 and not out:
            return members[0]
        out["anyOf"] = members
    return out


def interval(s):
    lo = hi = None
    lox = hix = False
    if "minimum" in s:
        lo, lox = s["minimum"], bool(s.get("exclusiveMinimum", False))
    if "minimumForOptimizer" in s and (lo is None or s["minimumForOptimizer"] > lo):
        lo, lox = s["minimumForOptimizer"], False
    if "maximum" in s:
        hi, hix = s["maximum"], bool(s.get("exclusiveMaximum", False))
    if "maximumForOptimizer" in s and (hi is None or s["maximumForOptimizer"] < hi):
        hi, hix = s["maximumForOptimizer"], False
    if lo is None and hi is None:
        for m in s.get("anyOf", []):
            r = interval(m)
            if r:
                return r
        return None
    return (lo, lox, hi, hix)


def inside(a, b):
    lo, lox, hi, hix = b
    if lo is not None:
        if a[0] is None or a[0] < lo or (a[0] == lo and lox and not a[1]):
            return False
    if hi is not None:
        if a[2] is None or a[2] > hi or (a[2] == hi and hix and not a[3]):
            return False
    return True


def terminals(p, arg):
    out = []
    t = p.get("type")
    for x in (t if isinstance(t, list) else [t] if t else []):
        if x in ("boolean", "integer", "number", "string"):
            out.append((arg, x))
    if "enum" in p:
        out.append((arg, "enum"))
    for m in p.get("anyOf", []) + p.get("allOf", []):
        out += terminals(m, arg)
    return out


def members(p, arg):
    out = [(arg, canon(v)) for v in p.get("enum", [])]
    for m in p.get("anyOf", []) + p.get("allOf", []):
        out += members(m, arg)
    return out


def overlap(a, b):
    b = list(b)
    n = 0
    for x in a:
        if x in b:
            b.remove(x)
            n += 1
    return n


def eq(a, b):
    if isinstance(a, (int, float)) and isinstance(b, (int, float)) and not isinstance(a, bool):
        return math.isclose(a, b, rel_tol=1e-9)
    return a == b


def count(gen, cur):
    g, gc = props(gen)
    c, cc = props(cur)
    row = {}
    row["arguments"] = [len(c), len(g), len(set(c) & set(g))]
    row["types"] = [sum(1 for s in c.values() if proj(s)), sum(1 for s in g.values() if proj(s)),
                    sum(1 for k in c if k in g and proj(c[k]) and canon(proj(c[k])) == canon(proj(g[k])))]
    row["defaults"] = [sum("default" in s for s in c.values()), sum("default" in s for s in g.values()),
                       sum(1 for k in c if k in g and "default" in c[k] and "default" in g[k]
                           and eq(c[k]["default"], g[k]["default"]))]
    row["ranges"] = [sum(interval(s) is not None for s in c.values()), sum(interval(s) is not None for s in g.values()),
                     sum(1 for k in c if k in g and interval(c[k]) and interval(g[k])
                         and inside(interval(g[k]), interval(c[k])))]
    row["distributions"] = [sum("distribution" in s for s in c.values()), sum("distribution" in s for s in g.values()),
                            sum(1 for k in c if k in g and "distribution" in c[k]
                                and c[k]["distribution"] == g[k].get("distribution"))]

    def lowered(cs):
        return [canon(sorted({canon(b): b for b in x["anyOf"]}.values(), key=canon)) for x in cs if "anyOf" in x]

    todo = sum(1 for x in gc if "anyOf" not in x and x.get("description", "").startswith("TODO"))
    lg, lc = lowered(gc), lowered(cc)
    row["constraints"] = [len(lc), len(lg), overlap(lg, lc), len(lg) + todo]
    tg = [t for k, s in g.items() for t in terminals(proj(s), k)]
    tc = [t for k, s in c.items() for t in terminals(proj(s), k)]
    row["type_values"] = [len(tc), len(tg), overlap(tg, tc)]
    eg = [t for k, s in g.items() for t in members(proj(s), k)]
    ec = [t for k, s in c.items() for t in members(proj(s), k)]
    row["enum_values"] = [len(ec), len(eg), overlap(eg, ec)]
    return row


def main(root):
    root = Path(root)
    expected = json.loads((root / "expected.json").read_text())
    bad = 0
    totals = {}
    for name, want in expected["classes"].items():
        got = count(json.loads((root / "generated" / f"{name}.json").read_text()),
                    json.loads((root / "curated" / f"{name}.json").read_text()))
        for cat, v in want.items():
            if got[cat] != v:
                print(f"{name} {cat}: recount {got[cat]} expected {v}")
                bad += 1
            t = totals.setdefault(cat, [0] * len(v))
            for i, x in enumerate(got[cat]):
                t[i] += x
    for cat, want in expected["totals"].items():
        r, g, m = totals[cat][:3]
        if totals[cat] != want["counts"]:
            print(f"totals {cat}: recount {totals[cat]} expected {want['counts']}")
            bad += 1
        p = m / g if g else 0.0
        rc = m / r if r else 0.0
        f = 2 * p * rc / (p + rc) if p + rc else 0.0
        for key, val in (("precision", p), ("recall", rc), ("f1", f)):
            if abs(val - want[key]) > 1e-5:
                print(f"totals {cat} {key}: recount {val:.6f} expected {want[key]}")
                bad += 1
    print("eval recount:", "ok" if not bad else f"{bad} disagreement(s)")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent.parent / "fixtures" / "eval"))
