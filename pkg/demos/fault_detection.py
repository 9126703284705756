"""How the validator pinpoints broken structure data.

Three failure modes: a bracket table that breaks the Jacobi identity,
a one-entry typo in an otherwise valid table, and a structure whose
brackets are fine but which admits no compatible calculus.
"""

from ncdc import (FormatError, PreconditionError, SuperStructure,
                  adjoint_representation, build_from_representation,
                  build_kappa, check_calculus_condition, exterior_derivative,
                  read_structure, validate_structure)


def main():
    # not a Lie algebra: three pairwise brackets chosen with no closure in mind
    bad = SuperStructure(3, 0, {(1, 2, 1): 1, (2, 3, 2): 1, (1, 3, 3): 1}, {})
    rep = validate_structure(bad)
    name, index, residual = rep.violations[0]
    print(f"cyclic bracket table: {name} fails at {index}, residual {residual}")

    # one-entry typo in a valid kappa table
    s = build_kappa(3, "S1", 0, [0, 0, 1])
    K = {(a, nu, b): s.K(a, nu, b)
         for a in (1, 2, 3) for nu in (1, 2, 3) for b in (1, 2, 3)
         if s.K(a, nu, b)}
    K[(1, 1, 1)] = 1
    rep = validate_structure(SuperStructure(3, 3, {(mu, nu, lam): s.C(mu, nu, lam)
                                                   for mu in (1, 2, 3)
                                                   for nu in (1, 2, 3)
                                                   for lam in (1, 2, 3)
                                                   if s.C(mu, nu, lam)}, K))
    print("typo K[1,1,1] = 1 lands on:")
    for name, index, residual in rep.violations:
        print(f"  {name} at {index}, residual {residual}")

    # valid brackets, no calculus: the solvable 2d algebra with its adjoint action
    C = {(1, 2, 2): 1}
    sol2 = build_from_representation(2, C, adjoint_representation(
        SuperStructure(2, 0, C, {})))
    print()
    print("solvable 2d algebra:",
          "brackets pass," if validate_structure(sol2).passed else "brackets fail,",
          "calculus", "passes" if check_calculus_condition(sol2).passed else
          "fails at " + str(check_calculus_condition(sol2).violations[0][1]))
    try:
        exterior_derivative(sol2, 4)
    except PreconditionError as exc:
        print("exterior derivative refuses:", exc)

    # malformed input files carry position information
    try:
        read_structure(b'{"format": "ncdc-structure/1", "n": 2, "m": 2,'
                       b' "C": [], "K": [{"idx": [1, 1, 1], "val": "-i"}]}')
    except FormatError as exc:
        print()
        print("malformed file:", exc)


if __name__ == "__main__":
    main()
