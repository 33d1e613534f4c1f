"""``strat-cat``: command-line access to every module.

JSON results go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 oracle disagreement, 2 invalid input, 3 inconclusive within bounds.

Payload arguments accept inline JSON, a file path, or ``-`` for stdin.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import braid as br
from . import category as cat
from . import cosheaf as cs
from . import symprod as sp
from .config import OracleConfig
from .groups import Inconclusive, abelianization, coset_enumerate
from .oracles import run_suite
from .order import Poset, Preorder

EXIT_OK, EXIT_DISAGREE, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3

POSET_HELP = (
    'poset JSON {"elements": [...], "leq": [[bool, ...], ...]} or a name: '
    "pseudocircle, chain:N, antichain:N"
)
PRECOSHEAF_HELP = (
    'precosheaf JSON {"space": {"points", "opens"}, "cosections": {"<open index>": [...]}, '
    '"extensions": {"i⊆j": [image indices]}}; extensions are needed along covering inclusions'
)
SPACE_OVER_HELP = 'space over X JSON {"total": space, "base": space, "projection": [...]}'
FUNCTOR_HELP = (
    'poset functor JSON {"poset": ..., "sets": {"x": [...]}, "maps": {"x<=y": [...]}, '
    '"variance": "covariant"|"contravariant"} or a name: two-origins, crossing-lines'
)
MORPHISM_HELP = 'morphism JSON {"n": 5, "P": [3, 2], "Q": [2, 1, 1, 1], "braid": "s1 s2^-1"}'


class InputError(ValueError):
    pass


def load_payload(text: str):
    if text == "-":
        text = sys.stdin.read()
    elif not text.lstrip().startswith(("{", "[")):
        path = Path(text)
        if not path.exists():
            raise InputError(f"not JSON and no such file: {text}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def load_poset(text: str) -> Poset:
    name, _, arg = text.partition(":")
    if name == "pseudocircle":
        return Poset.pseudocircle()
    if name in ("chain", "antichain") and arg.isdigit():
        k = int(arg)
        pre = Preorder.chain(k) if name == "chain" else Preorder.discrete(k)
        return Poset(pre.elements, pre.leq)
    pre = Preorder.from_json(load_payload(text))
    return Poset(pre.elements, pre.leq)


def load_functor(text: str) -> cs.PosetFunctor:
    if text == "two-origins":
        return cs.two_origins_functor()
    if text == "crossing-lines":
        return cs.crossing_lines_functor()
    return cs.PosetFunctor.from_json(load_payload(text))


def parse_braid(text: str, n: int | None) -> br.BraidWord:
    return br.BraidWord.parse(text, n)


def partition_arg(text: str, n: int | None) -> sp.AbstractPartition:
    p = sp.AbstractPartition.of(parse_ints(text))
    if n is not None and p.n != n:
        raise InputError(f"partition {text} does not sum to n={n}")
    return p


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# handlers return (payload, exit code)


def cmd_poset_cat(a):
    p = load_poset(a.poset)
    thin = cat.poset_category(p)
    n = len(p)
    strict = [[p.elements[x], p.elements[y]] for x in range(n) for y in range(n) if x != y and thin.hom[x][y]]
    return {"objects": list(p.elements), "morphisms": thin.morphism_count(), "strict": strict}, EXIT_OK


def cmd_poset_localize(a):
    p = load_poset(a.poset)
    pres = cat.present_poset(p)
    g = cat.localize_vertex_group(pres, a.base)
    out = {"category": pres.to_json(), "group": g.to_json(), "abelianization": abelianization(g).to_json()}
    return out, EXIT_OK


def cmd_poset_pi1ab(a):
    p = load_poset(a.poset)
    g = cat.localize_vertex_group(cat.present_poset(p), a.base)
    return abelianization(g).to_json(), EXIT_OK


def cmd_braid_nf(a):
    w = parse_braid(a.word, a.n)
    nf = br.normal_form(w)
    return {"normal_form": nf.to_json(), "word": str(nf.to_word())}, EXIT_OK


def cmd_braid_eq(a):
    u, v = parse_braid(a.u, a.n), parse_braid(a.v, a.n)
    if u.n != v.n:
        raise InputError("words have different strand counts")
    result = br.artin_equal(u, v) if a.method == "artin" else br.equal(u, v)
    return {"equal": result}, EXIT_OK


def cmd_braid_perm(a):
    p = br.permutation_of(parse_braid(a.word, a.n))
    return {"permutation": p.one_line(), "cycles": [list(c) for c in p.cycles()]}, EXIT_OK


def cmd_braid_cable(a):
    b = parse_braid(a.word, a.n)
    c = br.cable(b, parse_ints(a.widths))
    return {"n": c.n, "braid": str(c)}, EXIT_OK


def cmd_braid_member(a):
    w = parse_braid(a.word, a.n)
    sizes = parse_ints(a.blocks)
    if sum(sizes) != w.n:
        raise InputError(f"block sizes must sum to n={w.n}")
    blocks = br.blocks_from_sizes(sizes)
    out = {"member": br.parabolic_member(w, blocks)}
    if a.oracle:
        out["oracle"] = br.parabolic_member_oracle(w, blocks)
    return out, EXIT_OK


def cmd_spn_refines(a):
    p, q = partition_arg(a.p, a.n), partition_arg(a.q, a.n)
    return {"refines": sp.refines(p, q)}, EXIT_OK


def cmd_spn_pi0(a):
    p, q = partition_arg(a.p, a.n), partition_arg(a.q, a.n)
    pats = sp.double_cosets(p, q)
    out = {"count": len(pats), "patterns": [d.to_json() for d in pats]}
    if a.brute_force:
        out["brute_force_count"] = len(sp.brute_force_double_cosets(p, q))
    return out, EXIT_OK


def _morphism(text: str) -> sp.HomMorphism:
    return sp.HomMorphism.from_json(load_payload(text))


def cmd_spn_homeq(a):
    m, m2 = _morphism(a.m1), _morphism(a.m2)
    return {"equal": sp.hom_equal(m, m2)}, EXIT_OK


def cmd_spn_compose(a):
    m, m2 = _morphism(a.m1), _morphism(a.m2)
    c = sp.compose(m, m2)
    return {"morphism": c.to_json(), "pattern": sp.project_pi0(c).to_json()}, EXIT_OK


def cmd_spn_cover(a):
    cover = sp.branched_cover(a.n)
    out = {"objects": {str(p): len(cover.fibre(p)) for p in sp.partitions(a.n)}}
    if a.morphism:
        m = _morphism(a.morphism)
        out["map"] = [[list(k), list(v)] for k, v in sorted(cover.on_morphism(m).items())]
    return out, EXIT_OK


def cmd_rpn_skeleton(a):
    c = cat.rp_skeleton(a.n)
    homs = {f"{i}->{j}": len(cat.hom_classes(c, i, j)) for i in range(a.n + 1) for j in range(i + 1, a.n + 1)}
    return {"category": c.to_json(), "hom_classes": homs}, EXIT_OK


def cmd_rpn_pi1(a):
    g = cat.localize_vertex_group(cat.rp_skeleton(a.n))
    out = {"group": g.to_json(), "abelianization": abelianization(g).to_json()}
    try:
        out["order"] = coset_enumerate(g, a.bound)
        return out, EXIT_OK
    except Inconclusive as exc:
        out["order"] = None
        out["inconclusive"] = str(exc)
        return out, EXIT_INCONCLUSIVE


def cmd_cosheaf_check(a):
    f = cs.Precosheaf.from_json(load_payload(a.input))
    return cs.cosheaf_check(f, exhaustive=a.exhaustive).to_json(), EXIT_OK


def cmd_cosheaf_display(a):
    f = cs.Precosheaf.from_json(load_payload(a.input))
    d = cs.display(f)
    return {"space": d.space.to_json(), "points": [list(pt) for pt in d.points]}, EXIT_OK


def cmd_cosheaf_classify(a):
    y = cs.SpaceOverX.from_json(load_payload(a.input))
    return cs.classify_spread(y).to_json(), EXIT_OK


def cmd_cosheaf_cosheafify(a):
    f = cs.Precosheaf.from_json(load_payload(a.input))
    cf = cs.cosheafify(f)
    opens = f.base.opens
    counit = {str(i): list(cf.counit[u]) for i, u in enumerate(opens)}
    return {"cosheaf": cf.cosheaf.to_json(), "counit": counit, "counit_iso": cs.is_iso(cf.counit, cf.cosheaf, f)}, EXIT_OK


def cmd_cosheaf_roundtrip(a):
    return cs.functor_roundtrip(load_functor(a.input)).to_json(), EXIT_OK


def cmd_oracle(a):
    rep = run_suite(a.suite, OracleConfig.from_namespace(a))
    return rep.to_json(), EXIT_OK if rep.ok else EXIT_DISAGREE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="strat-cat", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    top = ap.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = top.add_parser(name, help=help_)
        return g.add_subparsers(dest="command", required=True)

    poset = group("poset", "fundamental categories of finite posets")
    for name, fn, help_ in (
        ("cat", cmd_poset_cat, "the thin category of a poset"),
        ("localize", cmd_poset_localize, "presented category and the abelianized groupoid vertex group"),
        ("pi1ab", cmd_poset_pi1ab, "abelianized vertex group of the groupoidification"),
    ):
        s = poset.add_parser(name, help=help_)
        s.add_argument("poset", help=POSET_HELP)
        if name != "cat":
            s.add_argument("--base", type=int, default=0, help="base object index")
        s.set_defaults(fn=fn)

    braid = group("braid", "normal forms and parabolic membership for braid words")
    s = braid.add_parser("nf", help="left normal form")
    s.add_argument("word", help='braid word, e.g. "s1 s2^-1" (or with an "n=3" header)')
    s.add_argument("--n", type=int)
    s.set_defaults(fn=cmd_braid_nf)
    s = braid.add_parser("eq", help="decide equality of two braid words")
    s.add_argument("u")
    s.add_argument("v")
    s.add_argument("--n", type=int)
    s.add_argument("--method", choices=("garside", "artin"), default="garside")
    s.set_defaults(fn=cmd_braid_eq)
    s = braid.add_parser("perm", help="underlying permutation (1-based final positions)")
    s.add_argument("word")
    s.add_argument("--n", type=int)
    s.set_defaults(fn=cmd_braid_perm)
    s = braid.add_parser("cable", help="cable a braid with the given strand widths")
    s.add_argument("word")
    s.add_argument("--n", type=int)
    s.add_argument("--widths", required=True, help="comma-separated widths, one per strand")
    s.set_defaults(fn=cmd_braid_cable)
    s = braid.add_parser("member", help="membership in a standard parabolic subgroup")
    s.add_argument("word")
    s.add_argument("--n", type=int)
    s.add_argument("--blocks", required=True, help="comma-separated consecutive block sizes")
    s.add_argument("--oracle", action="store_true", help="also run the strand-deletion oracle")
    s.set_defaults(fn=cmd_braid_member)

    spn = group("spn", "exit paths of the symmetric product")
    s = spn.add_parser("refines", help="is Q a refinement of P")
    s.add_argument("--n", type=int)
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    s.set_defaults(fn=cmd_spn_refines)
    s = spn.add_parser("pi0", help="refinement patterns (double cosets)")
    s.add_argument("--n", type=int)
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--brute-force", action="store_true", help="also count by brute force over S_n")
    s.set_defaults(fn=cmd_spn_pi0)
    s = spn.add_parser("homeq", help="equality of two morphisms")
    s.add_argument("m1", help=MORPHISM_HELP)
    s.add_argument("m2")
    s.set_defaults(fn=cmd_spn_homeq)
    s = spn.add_parser("compose", help="compose x_P -> x_Q -> x_R")
    s.add_argument("m1", help=MORPHISM_HELP)
    s.add_argument("m2")
    s.set_defaults(fn=cmd_spn_compose)
    s = spn.add_parser("cover", help="the branched cover functor")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--morphism", help=MORPHISM_HELP)
    s.set_defaults(fn=cmd_spn_cover)

    rpn = group("rpn", "real projective space")
    s = rpn.add_parser("skeleton", help="presented skeleton of the fundamental category")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_rpn_skeleton)
    s = rpn.add_parser("pi1", help="vertex group of the localization")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--bound", type=int, default=1000, help="coset table bound")
    s.set_defaults(fn=cmd_rpn_pi1)

    cosheaf = group("cosheaf", "cosheaves and their display spaces")
    for name, fn, help_, payload in (
        ("check", cmd_cosheaf_check, "the cosheaf condition", PRECOSHEAF_HELP),
        ("display", cmd_cosheaf_display, "display space of a precosheaf", PRECOSHEAF_HELP),
        ("classify", cmd_cosheaf_classify, "spread / complete / uniquely complete", SPACE_OVER_HELP),
        ("cosheafify", cmd_cosheaf_cosheafify, "cosheafification with its counit", PRECOSHEAF_HELP),
        ("roundtrip", cmd_cosheaf_roundtrip, "functor to space and back", FUNCTOR_HELP),
    ):
        s = cosheaf.add_parser(name, help=help_)
        s.add_argument("input", help=payload)
        if name == "check":
            s.add_argument("--exhaustive", action="store_true", help="test every cover, not just minimal ones")
        s.set_defaults(fn=fn)

    s = top.add_parser("oracle", help="run an oracle suite")
    s.add_argument("suite", choices=("braid", "spn", "poset", "cosheaf", "all"))
    OracleConfig.add_arguments(s)
    s.set_defaults(fn=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        payload, code = a.fn(a)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ValueError, KeyError, TypeError) as exc:
        # every module error derives from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    emit(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
