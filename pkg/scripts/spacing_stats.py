"""Level-spacing statistics of the deterministic map for alpha = 1/3, 1/5 and golden.

Desymmetrized spectra of alpha and 1 - alpha are pooled. Default sizes are
desk scale; ``--n-qubits 12`` reproduces the full-size comparison (slow).
"""

from _common import execute, parser

CASES = {"1/3": 11, "1/5": 10, "golden": 11}


def main():
    p = parser(__doc__)
    p.add_argument("--n-qubits", type=int, help="override the per-alpha default size")
    args = p.parse_args()
    for alpha, n_q in CASES.items():
        n_q = args.n_qubits or n_q
        table = execute(args, stem=f"spacing_{alpha.replace('/', '_')}_{n_q}",
                        experiment="spacing", alpha=alpha, n_qubits=n_q)
        r = table.rows[0]
        print(f"  alpha={alpha:7s} N={r['N']:5d} beta={r['beta']}  KS: semi-Poisson {r['ks_sp']:.4f}"
              f"  Poisson {r['ks_poisson']:.4f}  COE {r['ks_coe']:.4f}")


if __name__ == "__main__":
    main()
