"""IPR scaling of eigenvectors and late columns of the non-symmetric random-phase ensemble."""

from _common import execute, parser


def main():
    p = parser(__doc__)
    p.add_argument("--ensemble", type=int, default=100)
    p.add_argument("--n-qubits", default="6..10")
    p.add_argument("--alphas", default="1/3,1/5,1/7,golden")
    args = p.parse_args()
    for alpha in args.alphas.split(","):
        table = execute(args, stem=f"ipr_{alpha.replace('/', '_')}", experiment="ipr", variant="isrm-nonsym",
                        alpha=alpha, n_qubits=args.n_qubits, ensemble=args.ensemble)
        for series in ("eigvec", "column"):
            rows = table.where(series=series)
            if rows:
                print(f"  alpha={alpha:7s} {series:6s} gamma {rows[0]['gamma']:.3f}"
                      f"  (N = {', '.join(str(r['N']) for r in rows)})")


if __name__ == "__main__":
    main()
