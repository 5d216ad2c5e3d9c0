"""Short-time traces: N-independent form factor for rational alpha, vanishing for golden."""

from _common import execute, parser


def main():
    p = parser(__doc__)
    p.add_argument("--n-qubits", default="7..10")
    args = p.parse_args()
    for alpha in ("1/3", "golden"):
        table = execute(args, stem=f"formfactor_{alpha.replace('/', '_')}", experiment="formfactor",
                        alpha=alpha, n_qubits=args.n_qubits)
        for N in sorted({r["N"] for r in table.rows}):
            r = table.where(N=N)[0]
            print(f"  alpha={alpha:7s} N={N:5d}  mean |t_n|^2/N {r['ff']:.4f}  |kappa|^2 {r['kappa_sq']:.4f}")


if __name__ == "__main__":
    main()
