"""Print, for every closed-form branch, the first grid point that lands in it.

The value column is the closed form at that point; it is recomputed by
enumeration and the script fails loudly if the two ever differ.
"""

from coulter_sums import closed_forms as cf
from coulter_sums.harness import find_branch_instance, value_json
from coulter_sums.oracles import evaluate_oracle


def fmt(spec):
    parts = [f"p={spec.p}", f"e={spec.e}", f"alpha={spec.alpha}"]
    for name in ("a_fq", "a_fp", "c_fp", "b_fq"):
        v = getattr(spec, name)
        if v is not None:
            parts.append(f"{name[0]}={v}")
    return " ".join(parts)


def main():
    print("| branch | first instance | value |")
    print("|---|---|---|")
    for label in cf.ALL_LABELS:
        spec = find_branch_instance(label)
        cell = label.replace("|", "\\|")
        if spec is None:
            print(f"| {cell} | none | |")
            continue
        closed = cf.evaluate_closed(spec).expand()
        assert closed == evaluate_oracle(spec), label
        v = value_json(closed)
        shown = v["int"] if v["kind"] == "int" else v["coeffs"]
        print(f"| {cell} | {fmt(spec)} | {shown} |")


if __name__ == "__main__":
    main()
