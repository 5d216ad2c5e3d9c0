"""Spacing classes of the random-phase ensemble at N = 512."""

from _common import execute, parser

CASES = [("isrm-nonsym", "1/3"), ("isrm-sym", "1/3"), ("isrm-nonsym", "golden"), ("isrm-sym", "golden")]


def main():
    p = parser(__doc__)
    p.add_argument("--ensemble", type=int, default=50)
    p.add_argument("--phase-source", default="ideal", choices=["ideal", "circuit"])
    args = p.parse_args()
    for variant, alpha in CASES:
        stem = f"isrm_{variant}_{alpha.replace('/', '_')}_{args.phase_source}"
        table = execute(args, stem=stem, experiment="isrm_stats", variant=variant, alpha=alpha, n_qubits=9,
                        ensemble=args.ensemble, phase_source=args.phase_source)
        r = table.rows[0]
        print(f"  {variant:12s} alpha={alpha:7s} beta={r['beta']}  KS: semi-Poisson {r['ks_sp']:.4f}"
              f"  COE {r['ks_coe']:.4f}  CUE {r['ks_cue']:.4f}")


if __name__ == "__main__":
    main()
