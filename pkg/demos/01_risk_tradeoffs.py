"""How much does a correlation estimate cost, in bits?

Two parties observe correlated +-1 or Gaussian samples and may exchange
only k bits total. This script races the estimation schemes against each
other and against the closed-form benchmarks at a fixed budget:

  naive   one sign comparison per bit, k products averaged
  max     Alice points at her largest of 2^k Gaussians, Bob reads his
          sample at that index
  local   same pointer, but truncated to a prefix when a nominal
          correlation is known in advance
  two_way a short sign-agreement phase estimates the nominal first

The pointer schemes spend the budget on *one* extreme sample instead of
k noisy products, which is what buys the (1-rho^2)^2 local behavior.
"""

from corrcomm import (
    SchemeConfig,
    estimate_risk,
    max_scheme_mse_exact,
    naive_mse_exact,
    risk_bounds,
)

K = 16
TRIALS = 40_000
SEED = 7


def main() -> None:
    print(f"budget k = {K} bits, {TRIALS} trials per cell, seed {SEED}")
    print()
    header = (
        f"{'rho':>5} {'naive':>10} {'max':>10} {'local':>10} {'two_way':>10}"
        f" {'naive exact':>12} {'max exact':>12} {'local bound':>12}"
    )
    print(header)
    for rho in (0.0, 0.3, 0.6, 0.9):
        cells = {
            "naive": SchemeConfig("naive", K),
            "max": SchemeConfig("max", K),
            "local": SchemeConfig("local", K, {"rho_nominal": rho}),
            "two_way": SchemeConfig("two_way", K, {"k1": 4}),
        }
        mses = {
            name: estimate_risk(config, rho, TRIALS, SEED).mse
            for name, config in cells.items()
        }
        bounds = risk_bounds(K, rho)
        print(
            f"{rho:>5.1f} {mses['naive']:>10.5f} {mses['max']:>10.5f}"
            f" {mses['local']:>10.5f} {mses['two_way']:>10.5f}"
            f" {naive_mse_exact(K, rho):>12.5f}"
            f" {max_scheme_mse_exact(K, rho):>12.5f}"
            f" {bounds.local_upper:>12.5f}"
        )
    print()
    print("Reading the table:")
    print(" - the max scheme beats naive at every rho, roughly by 2 ln 2")
    print(" - the local scheme pulls ahead as rho grows: its fallback and")
    print("   prefix are tuned to the nominal value, so (1-rho^2)^2 kicks in")
    print(" - two_way is the same composition run blind: phase 1 spends")
    print("   sqrt(k) bits estimating the nominal first. At this budget four")
    print("   sign comparisons cannot pin it down, decode failures hand back")
    print("   the noisy phase-1 guess, and the column is dominated by that")
    print("   variance. The composition is faithful; its payoff is a")
    print("   large-budget phenomenon, not a k = 16 one.")


if __name__ == "__main__":
    main()
