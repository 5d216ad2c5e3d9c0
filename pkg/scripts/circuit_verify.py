"""Gate counts and circuit/matrix agreement for both circuits."""

import sys

from _common import execute, parser


def main():
    p = parser(__doc__)
    p.add_argument("--n-qubits", default="2..12")
    p.add_argument("--counting", default="paper", choices=["paper", "optimized"])
    args = p.parse_args()
    table = execute(args, experiment="circuit_verify", n_qubits=args.n_qubits, counting=args.counting)
    failed = [r for r in table.rows if not r["passed"]]
    for r in table.where(circuit="map"):
        print(f"  n_q={r['n_q']:2d} map: {r['one_qubit']} + {r['two_qubit']} = {r['total']} gates,"
              f" deviation {r['max_deviation']:.1e}")
    print(f"{len(table.rows) - len(failed)}/{len(table.rows)} rows passed")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
