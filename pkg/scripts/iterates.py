"""Matrix-element and entanglement distributions of late map iterates (n_q = 8)."""

from _common import execute, parser


def main():
    p = parser(__doc__)
    p.add_argument("--windows", default="1000:1100,100000:100101")
    args = p.parse_args()
    for alpha in ("1/3", "golden"):
        table = execute(args, stem=f"iterates_{alpha.replace('/', '_')}", experiment="iterates",
                        alpha=alpha, n_qubits=8, iterate_windows=args.windows)
        for r in table.rows:
            if r["stat_kind"] == "intensity" and r["bin_center"] == table.rows[0]["bin_center"]:
                print(f"  alpha={alpha:7s} {r['representation']}-rep n in [{r['window_lo']}, {r['window_hi']})"
                      f"  KS vs exp(-y) {r['ks_porter_thomas']:.4f}")


if __name__ == "__main__":
    main()
