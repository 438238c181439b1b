"""Command-line front end: ``turboweave <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import designer, sim
from .ids import CorrModel, ids_scores
from .interleaver import (
    Permutation,
    alpha_search,
    deterministic,
    random_interleaver,
    s_random,
    verify_spread,
)
from .turbo.distance import distance_search
from .turbo.rsc import RscSpec


def _encoder(text: str) -> RscSpec:
    fb, _, ff = text.partition(",")
    if not ff:
        raise argparse.ArgumentTypeError("encoder must look like 15,17")
    return RscSpec.from_octal(fb.strip(), ff.strip())


def cmd_interleaver(args) -> int:
    if args.kind == "random":
        p = random_interleaver(args.n, args.seed)
    elif args.kind == "srandom":
        if args.s is None:
            raise SystemExit("srandom needs --s")
        p = s_random(args.n, args.s, args.seed)
    else:
        if args.alpha is None:
            best = alpha_search(args.n)[0]
            args.alpha = best[0]
            print(f"alpha={best[0]} s1={best[1]} s2={best[2]}")
        p = deterministic(args.n, args.alpha)
    p.save(args.out)
    print(f"wrote {args.out} (N={p.n})")
    return 0


def cmd_alpha(args) -> int:
    print("alpha,s1,s2")
    for a, s1, s2 in alpha_search(args.n)[: args.top]:
        print(f"{a},{s1},{s2}")
    return 0


def cmd_spread(args) -> int:
    p = Permutation.load(args.interleaver)
    rep = verify_spread(p, args.s1, args.s2, circular=args.circular)
    print(f"s1_achieved={rep.s1_achieved} s2_achieved={rep.s2_achieved} violations={len(rep.violations)}")
    print("ok" if rep.ok else "FAILED")
    return 0 if rep.ok else 1


def cmd_ids(args) -> int:
    p = Permutation.load(args.interleaver)
    s = ids_scores(CorrModel(args.a, args.c, p.n), p, ids2_pair=args.pair)
    print(f"ids     {s.ids:.10g}")
    print(f"ids1    {s.ids1:.10g}")
    print(f"ids2    {s.ids2:.10g}")
    print(f"ids_new {s.ids_new:.10g}")
    if args.csv:
        print("n,a,c,ids,ids1,ids2,ids_new")
        print(",".join(map(repr, (p.n, args.a, args.c, *s.as_row()))))
    return 0


def cmd_dmin(args) -> int:
    p = Permutation.load(args.interleaver)
    rep = distance_search(args.encoder, p, args.wdet, args.dcap)
    print(rep.to_text())
    print()
    print(rep.to_csv(), end="")
    return 0


def cmd_design(args) -> int:
    params = designer.DesignParams(
        n=args.n,
        s1=args.s1,
        s2=args.s2,
        w_det=args.wdet,
        d_min_target=args.dmin,
        seed=args.seed,
        max_step2_rounds=args.rounds,
        a=args.a,
        c=args.c,
        spec=args.encoder,
    )
    result = designer.design(params)
    result.save(args.out, args.trace)
    tr = result.trace
    print(f"converged={tr.converged} rounds={tr.rounds} swaps={len(tr.swaps)} skipped={tr.skipped}")
    if not tr.converged:
        print("step 2 did not converge; try a lower --dmin", file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args) -> int:
    ch = sim.ChannelSpec(args.mod, sim.parse_grid(args.ebn0), args.rate)
    cfg = sim.RunConfig(
        interleaver=args.interleaver,
        spec=args.encoder,
        iterations=args.iters,
        min_frame_errors=args.min_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        include_tail_energy=not args.exclude_tail_energy,
        early_stop=args.early_stop,
        workers=args.workers,
    )
    points = sim.simulate(cfg, ch)
    sim.write_csv(points, args.out)
    for pt in points:
        print(f"{pt.ebn0_db:6.2f} dB  frames={pt.frames:<8d} ber={pt.ber:.3e} fer={pt.fer:.3e}")
    return 0


def cmd_plot(args) -> int:
    files = args.inputs.split(",")
    labels = args.labels.split(",") if args.labels else files
    if len(labels) != len(files):
        raise SystemExit("need one label per input file")
    sim.write_svg({lab: sim.read_csv(f) for lab, f in zip(labels, files)}, args.out, args.title)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="turboweave", description="Turbo-code interleaver design and evaluation.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("interleaver", help="generate a random, S-random or deterministic interleaver")
    g.add_argument("kind", choices=["random", "srandom", "deterministic"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s", type=int)
    g.add_argument("--alpha", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_interleaver)

    g = sub.add_parser("alpha", help="rank multipliers for the deterministic interleaver")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--top", type=int, default=10)
    g.set_defaults(func=cmd_alpha)

    g = sub.add_parser("spread", help="check S1/S2 spread of an interleaver file")
    g.add_argument("--interleaver", required=True)
    g.add_argument("--s1", type=int, required=True)
    g.add_argument("--s2", type=int, default=0)
    g.add_argument("--circular", action="store_true")
    g.set_defaults(func=cmd_spread)

    g = sub.add_parser("ids", help="iterative-decoding suitability scores")
    g.add_argument("--interleaver", required=True)
    g.add_argument("--a", type=float, default=0.5)
    g.add_argument("--c", type=float, default=0.2)
    g.add_argument("--pair", choices=["third", "deint"], default="third")
    g.add_argument("--csv", action="store_true")
    g.set_defaults(func=cmd_ids)

    g = sub.add_parser("dmin", help="low-weight codeword search")
    g.add_argument("--interleaver", required=True)
    g.add_argument("--wdet", type=int, default=4)
    g.add_argument("--dcap", type=int, default=20)
    g.add_argument("--encoder", type=_encoder, default=RscSpec.from_octal("15", "17"))
    g.set_defaults(func=cmd_dmin)

    g = sub.add_parser("design", help="interleaver design")
    g.add_argument("method", choices=["twostep"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s1", type=int, required=True)
    g.add_argument("--s2", type=int, default=0)
    g.add_argument("--wdet", type=int, default=4)
    g.add_argument("--dmin", type=int, default=20)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--rounds", type=int, default=100)
    g.add_argument("--a", type=float, default=0.5)
    g.add_argument("--c", type=float, default=0.2)
    g.add_argument("--encoder", type=_encoder, default=RscSpec.from_octal("15", "17"))
    g.add_argument("--out", required=True)
    g.add_argument("--trace")
    g.set_defaults(func=cmd_design)

    g = sub.add_parser("simulate", help="Monte-Carlo BER/FER run")
    g.add_argument("--interleaver", required=True)
    g.add_argument("--rate", choices=["1/3", "1/2"], default="1/3")
    g.add_argument("--mod", choices=list(sim.MODULATIONS), default="bpsk")
    g.add_argument("--ebn0", default="0:0.5:2", help="lo:step:hi or a comma list (dB)")
    g.add_argument("--iters", type=int, default=18)
    g.add_argument("--min-errors", type=int, default=100)
    g.add_argument("--max-frames", type=int, default=100_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--exclude-tail-energy", action="store_true")
    g.add_argument("--early-stop", action="store_true")
    g.add_argument("--encoder", type=_encoder, default=RscSpec.from_octal("15", "17"))
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_simulate)

    g = sub.add_parser("plot", help="SVG BER plot from result CSVs")
    g.add_argument("--in", dest="inputs", required=True)
    g.add_argument("--labels")
    g.add_argument("--title", default="")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
