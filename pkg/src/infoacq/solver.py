"""Saddle-point solvers for information-acquisition problems.

A solution is a pair ``(alpha, lambda)`` maximizing over action distributions
and minimizing over state multipliers the objective

    L(alpha, lambda) = sum_a alpha(a) f*(a pi - lambda) + sum_s lambda(s),

whose saddle value equals the optimal net payoff of the primal problem.  The
first-order conditions are: the conjugate values f*(a pi - lambda) are
maximal on the support of alpha, and the reconstructed rows

    P[s, a] = alpha(a) * grad_s f*(a pi - lambda)

sum to one in every state.  Backends: an exact-inner-minimization best
response with an active-set Newton polish, an extragradient (mirror-prox)
scheme on the boxed multiplier, and closed-form routes for mutual
information (multiplicative fixed point) and perceptual costs (reduction to
the attribute problem).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import root as scipy_root

from ._rootfind import BracketError, bracketed_root, expand_bracket
from .core import (
    ChoiceRule,
    DecisionProblem,
    ValidationError,
    detect_symmetries,
    is_transitive_on_states,
    validate_problem,
)
from .costs import (
    CostModel,
    CsiszarCost,
    PerceptualCsiszarCost,
    PosteriorSeparableCost,
    csiszar_cost,
    mutual_information_cost,
)
from .transform import Transform


class SolverError(RuntimeError):
    pass


@dataclass
class SolveOptions:
    backend: str = "closed_form_auto"
    tol: float = 1e-8
    max_iter: int = 200000
    box_override: float | None = None
    seed: int = 0
    exploit_symmetry: bool = True
    polish: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise ValidationError("tolerance must be positive")
        if self.max_iter < 1:
            raise ValidationError("iteration cap must be at least 1")
        if self.backend not in ("closed_form_auto", "best_response", "mirror_prox"):
            raise ValidationError(f"unknown backend {self.backend!r}")


@dataclass
class MultiplierBox:
    bound: float
    epsilon: float
    translation_slice: bool = False
    reduced: bool = False
    detail: str = ""

    def contains(self, lam: np.ndarray, margin: float = 1e-9) -> bool:
        return bool(np.max(np.abs(lam)) <= self.bound * (1 + 1e-12) + margin)


@dataclass
class Solution:
    problem: DecisionProblem
    model: CostModel
    alpha: np.ndarray
    lam: np.ndarray
    rule: ChoiceRule
    value: float
    gap: float
    residual_alpha: float
    residual_lambda: float
    converged: bool
    iterations: int
    backend: str
    box: MultiplierBox | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def lam_pi(self) -> np.ndarray:
        return self.lam / self.problem.prior

    def consideration_set(self, tol: float = 1e-9) -> tuple[str, ...]:
        keep = np.flatnonzero(self.rule.unconditional > tol)
        return tuple(self.problem.action_names[i] for i in keep)


# ---------------------------------------------------------------------------
# shared evaluation helpers


def payoff_arguments(problem: DecisionProblem, lam: np.ndarray) -> np.ndarray:
    """Matrix of payoff-space conjugate arguments, one row per action."""
    return problem.payoffs * problem.prior[None, :] - lam[None, :]


def evaluate(problem, model, lam):
    X = payoff_arguments(problem, lam)
    return model.f_star_rows(X), model.grad_rows(X)


def foc_residuals(problem, model, alpha, lam):
    """(residual_alpha, residual_lambda, values, gradients) at a candidate pair."""
    v, G = evaluate(problem, model, lam)
    vmax = float(v.max())
    res_a = float(alpha @ (vmax - v))
    res_l = float(np.max(np.abs(alpha @ G - 1.0)))
    return res_a, res_l, v, G


def saddle_value(problem, model, alpha, lam) -> float:
    v, _ = evaluate(problem, model, lam)
    return float(alpha @ v + lam.sum())


# ---------------------------------------------------------------------------
# multiplier bounds


def _ps_entropy_spread(model: PosteriorSeparableCost, eps: float, samples: int = 256) -> float:
    """Estimated max |H(p) - H(prior)| over the eps-ball around the prior in the simplex."""
    prior = model.prior
    n = prior.size
    h = model.entropy
    if h.family == "shannon_kl":
        kap = h.value(np.eye(n)[0]) / max(-math.log(prior[0]), 1e-300)  # recover scale
        return kap * math.log(1.0 + eps / prior.min())
    best = 0.0
    # pairwise mass transfers of size eps are extreme points of the ball-simplex slice
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            p = prior.copy()
            p[i] += eps
            p[j] -= eps
            if p[j] <= 0:
                continue
            best = max(best, abs(h.value(p)))
    rng = np.random.default_rng(0)
    for _ in range(samples):
        signs = rng.choice([-1.0, 1.0], size=n)
        p = np.maximum(prior + eps * signs, 1e-12)
        p /= p.sum()
        if np.max(np.abs(p - prior)) <= eps + 1e-12:
            best = max(best, abs(h.value(p)))
    return 1.5 * best  # sampling underestimates a convex max; pad


def multiplier_bounds(
    problem: DecisionProblem, model: CostModel, epsilon: float | None = None
) -> MultiplierBox:
    """A finite sup-norm box guaranteed to contain a saddle multiplier.

    For statewise-separable costs the bound is
    ``(2/eps + 1) (max_a ||a||_inf + max_{|x-1|<=eps} |f(x)|)`` with the max
    of the separable f taken coordinatewise at the corners.  For
    posterior-separable costs the bound applies on the sum-zero slice and
    uses the entropy's spread near the prior.  Perceptual costs are bounded
    through their reduced attribute problem.
    """
    a_inf = problem.payoff_bound()
    if isinstance(model, PerceptualCsiszarCost):
        reduced, _, _ = _reduced_problem(problem, model.encoder)
        inner = multiplier_bounds(reduced, csiszar_cost(reduced.prior, model.transform))
        return replace(inner, reduced=True, detail="bound on the attribute-space multiplier")
    if isinstance(model, PosteriorSeparableCost):
        eps = epsilon if epsilon is not None else min(0.5, problem.prior.min() / 2)
        if eps <= 0:
            raise SolverError("prior on the boundary: no valid ball radius")
        spread = _ps_entropy_spread(model, eps)
        bound = (2.0 / eps + 1.0 / problem.prior.min()) * (a_inf + spread)
        return MultiplierBox(bound, eps, translation_slice=True)
    if isinstance(model, CsiszarCost):
        eps = epsilon if epsilon is not None else 0.5
        t = model.transform
        lo, hi = float(t.phi(1.0 - eps)), float(t.phi(1.0 + eps))
        for _ in range(30):
            if math.isfinite(lo) and math.isfinite(hi):
                break
            eps /= 2
            if eps < 1e-12:
                raise SolverError("1 on the boundary of the transform domain")
            lo, hi = float(t.phi(1.0 - eps)), float(t.phi(1.0 + eps))
        fmax = max(abs(lo), abs(hi))  # separable max over the box corners
        bound = (2.0 / eps + 1.0) * (a_inf + fmax)
        return MultiplierBox(bound, eps)
    raise SolverError(f"no multiplier bound available for family {model.family!r}")


# ---------------------------------------------------------------------------
# statewise multipliers (separable costs)


def statewise_multiplier(alpha, payoffs_state, transform: Transform, tol: float = 1e-12) -> float:
    """Prior-adjusted multiplier in one state given the action distribution.

    Solves ``sum_a alpha(a) psi'(a(s) - l) = 1`` on the bracket spanned by
    the supported payoffs (the equation is decreasing in ``l`` and the
    normalization psi'(0)=1 pins the signs at the endpoints), then refines by
    safeguarded secant.
    """
    alpha = np.asarray(alpha, dtype=float)
    pay = np.asarray(payoffs_state, dtype=float)
    supp = alpha > 0.0
    if not np.any(supp):
        raise ValidationError("empty support")
    w, vals = alpha[supp], pay[supp]
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-15:
        return lo

    def g(l):
        return float(w @ transform.psi_prime(vals - l)) - 1.0

    try:
        return bracketed_root(g, lo, hi, xtol=tol)
    except BracketError as exc:
        raise BracketError(
            "statewise multiplier bracket failed; transform response is not monotone"
        ) from exc


def chi2_multiplier(alpha, payoffs_state, kappa: float = 1.0) -> float:
    """Closed-form statewise multiplier for the quadratic transform.

    Actions in the support are ranked by payoff (descending, ties by index);
    the cutoff keeps every action whose payoff gap to the running mixture is
    below kappa, and the multiplier is the truncated mixture average shifted
    by the unused budget.
    """
    alpha = np.asarray(alpha, dtype=float)
    pay = np.asarray(payoffs_state, dtype=float)
    keep = np.flatnonzero(alpha > 0.0)
    if keep.size == 0:
        raise ValidationError("empty support")
    order = keep[np.lexsort((keep, -pay[keep]))]
    a = pay[order]
    w = alpha[order]
    cum_w = np.cumsum(w)
    cum_wa = np.cumsum(w * a)
    gaps = cum_wa - cum_w * a  # sum_{j<=i} alpha_j (a_j - a_i)
    inside = gaps < kappa
    istar = int(np.max(np.flatnonzero(inside)))
    s = cum_w[istar]
    return float(cum_wa[istar] / s - kappa / s + kappa)


def _mi_statewise(alpha, payoffs_state, kappa):
    logits = np.where(alpha > 0, np.log(np.maximum(alpha, 1e-300)) + payoffs_state / kappa, -np.inf)
    mx = logits.max()
    return kappa * (mx + math.log(np.exp(logits - mx).sum()))


def _inner_minimize(problem, model, alpha, lam0, box, inner_tol=1e-11, max_sweeps=400):
    """Exact best response in the multiplier given alpha.

    Statewise for separable costs; cyclic coordinate root finding otherwise,
    with the multiplier recentered to the sum-zero slice for translation-
    invariant conjugates.
    """
    prior = problem.prior
    n = problem.n_states
    if isinstance(model, CsiszarCost):
        t = model.transform
        lam_pi = np.empty(n)
        for s in range(n):
            pay = problem.payoffs[:, s]
            if t.family == "shannon":
                lam_pi[s] = _mi_statewise(alpha, pay, t.params["kappa"])
            elif t.family == "chi2":
                lam_pi[s] = chi2_multiplier(alpha, pay, t.params["kappa"])
            else:
                lam_pi[s] = statewise_multiplier(alpha, pay, t)
        return prior * lam_pi

    lam = np.zeros(n) if lam0 is None else lam0.copy()
    if model.translation_invariant:
        lam = lam - lam.sum() * prior

    def residual(l):
        _, G = evaluate(problem, model, l)
        return alpha @ G - 1.0

    # fast path: smooth root on the mass conditions (projected to the
    # sum-zero slice for translation-invariant conjugates, where one
    # condition is redundant)
    basis = _slice_basis(n) if model.translation_invariant else None

    def F(z):
        l = basis @ z if basis is not None else z
        r = residual(l)
        return basis.T @ r if basis is not None else r

    z0 = basis.T @ lam if basis is not None else lam
    try:
        res = scipy_root(F, z0, method="hybr", options={"xtol": 1e-13})
        cand = basis @ res.x if basis is not None else res.x
        if np.all(np.isfinite(cand)) and float(np.max(np.abs(residual(cand)))) <= inner_tol:
            return cand
    except Exception:
        pass

    # fallback: cyclic coordinate root finding
    spread = max(1.0, problem.payoff_bound())
    for _ in range(max_sweeps):
        if float(np.max(np.abs(residual(lam)))) <= inner_tol:
            break
        for s in range(n):
            def g(ls, s=s):
                trial = lam.copy()
                trial[s] = ls
                _, G = evaluate(problem, model, trial)
                return float(alpha @ G[:, s]) - 1.0

            lo, hi = lam[s] - spread, lam[s] + spread
            try:
                lo, hi = expand_bracket(g, lo, hi)
            except BracketError:
                continue
            lam[s] = bracketed_root(g, lo, hi, xtol=1e-13)
        if model.translation_invariant:
            lam = lam - lam.sum() * prior
    if model.translation_invariant:
        lam = lam - lam.sum() * prior
    return lam


# ---------------------------------------------------------------------------
# Newton polish on the active set


def _slice_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the hyperplane of sum-zero multiplier directions."""
    a = np.eye(n) - np.full((n, n), 1.0 / n)
    u, s, _ = np.linalg.svd(a)
    return u[:, : n - 1]


def _polish_once(problem, model, alpha0, lam0, support, tol):
    """One active-set Newton pass over a candidate support; None on failure."""
    n = problem.n_states
    m = problem.n_actions
    ps = model.translation_invariant
    basis = _slice_basis(n) if ps else None
    support = sorted(set(support))
    for _ in range(2 * m + 2):
        S = np.array(support, dtype=int)
        k = S.size
        a0 = np.maximum(alpha0[S], 1e-12)
        a0 = a0 / a0.sum()
        if ps:
            l0 = lam0 - lam0.sum() * problem.prior
            z0 = np.concatenate([a0, basis.T @ l0])
        else:
            z0 = np.concatenate([a0, lam0])

        def F(z):
            a_s = z[:k]
            lam = basis @ z[k:] if ps else z[k:]
            alpha = np.zeros(m)
            alpha[S] = a_s
            v, G = evaluate(problem, model, lam)
            r1 = alpha @ G - 1.0
            r2 = v[S[1:]] - v[S[0]]
            if ps:
                return np.concatenate([r1, r2])
            return np.concatenate([r1, r2, [a_s.sum() - 1.0]])

        try:
            res = scipy_root(F, z0, method="hybr", options={"xtol": 1e-13})
            failed = (not res.success) and np.max(np.abs(F(res.x))) > 1e-9
        except Exception:
            failed = True
        if failed:
            # the equal-value system may be infeasible on this support, e.g.
            # when it includes a dominated action; retry without the lightest
            if k == 1:
                return None
            drop = S[int(np.argmin(a0))]
            support = [i for i in support if i != drop]
            continue
        z = res.x
        a_s = z[:k]
        lam = basis @ z[k:] if ps else z[k:]
        if a_s.min() < -1e-9:
            drop = S[int(np.argmin(a_s))]
            support = [i for i in support if i != drop]
            if not support:
                return None
            continue
        alpha = np.zeros(m)
        alpha[S] = np.maximum(a_s, 0.0)
        total = alpha.sum()
        if total <= 0:
            return None
        alpha /= total
        res_a, res_l, v, _ = foc_residuals(problem, model, alpha, lam)
        if res_a <= tol and res_l <= tol:
            return alpha, lam
        # an off-support action attains a strictly larger conjugate value
        outside = [i for i in range(m) if i not in support]
        if outside:
            j = outside[int(np.argmax(v[outside]))]
            if v[j] > v[S[0]] + 1e-12:
                support.append(j)
                continue
        return None
    return None


def _polish(problem, model, alpha0, lam0, support, tol):
    """Active-set Newton polish; prefers boundary solutions over stray masses.

    Tiny positive weights produced by the square system are usually artifacts
    of an over-wide support guess; when dropping them still verifies the
    optimality conditions, the reduced solution wins.
    """
    got = _polish_once(problem, model, alpha0, lam0, support, tol)
    if got is None:
        return None
    alpha, lam = got
    for _ in range(problem.n_actions):
        tiny = np.flatnonzero((alpha > 0) & (alpha < 1e-7))
        if tiny.size == 0:
            break
        kept = [int(i) for i in np.flatnonzero(alpha > 0) if i not in set(tiny.tolist())]
        if not kept:
            break
        retry = _polish_once(problem, model, alpha, lam, kept, tol)
        if retry is None:
            break
        alpha, lam = retry
    return alpha, lam


def _support_guess(alpha, v, rel=1e-7):
    vmax = float(v.max())
    scale = max(1.0, abs(vmax))
    keep = set(np.flatnonzero(alpha > 1e-8 * alpha.max()).tolist())
    keep |= set(np.flatnonzero(v >= vmax - rel * scale).tolist())
    return sorted(keep)


# ---------------------------------------------------------------------------
# backends


def _init_alpha(m: int, seed: int) -> np.ndarray:
    if seed == 0:
        return np.full(m, 1.0 / m)
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(m))


def _best_response_backend(problem, model, opts, box):
    alpha = _init_alpha(problem.n_actions, opts.seed)
    lam = _inner_minimize(problem, model, alpha, None, box, inner_tol=min(1e-11, opts.tol / 10))
    best = (math.inf, alpha.copy(), lam.copy())
    step_scale = None
    polish_at = 3
    iters = 0
    converged = False
    for k in range(1, opts.max_iter + 1):
        iters = k
        res_a, res_l, v, _ = foc_residuals(problem, model, alpha, lam)
        score = max(res_a, res_l)
        if score < best[0]:
            best = (score, alpha.copy(), lam.copy())
        if score <= opts.tol:
            converged = True
            if opts.polish and score > 0.0:
                got = _polish(problem, model, alpha, lam, _support_guess(alpha, v), opts.tol)
                if got is not None:
                    ra2, rl2, _, _ = foc_residuals(problem, model, *got)
                    if max(ra2, rl2) <= score:
                        alpha, lam = got
                        best = (max(ra2, rl2), alpha.copy(), lam.copy())
            break
        if opts.polish and (k >= polish_at or res_a <= 10 * opts.tol):
            polish_at = min(2 * polish_at + 1, polish_at + 50)
            got = _polish(problem, model, alpha, lam, _support_guess(alpha, v), opts.tol)
            if got is not None:
                alpha, lam = got
                res_a, res_l, v, _ = foc_residuals(problem, model, alpha, lam)
                best = (max(res_a, res_l), alpha.copy(), lam.copy())
                converged = max(res_a, res_l) <= opts.tol
                break
        vmax = float(v.max())
        if step_scale is None:
            step_scale = max(vmax - float(v.min()), 1e-9)
        step = 2.0 / (step_scale * math.sqrt(k))
        alpha = alpha * np.exp(step * (v - vmax))
        total = alpha.sum()
        if total <= 0 or not np.isfinite(total):
            alpha = _init_alpha(problem.n_actions, opts.seed + 1)
        else:
            alpha /= total
        lam = _inner_minimize(problem, model, alpha, lam, box, inner_tol=min(1e-11, opts.tol / 10))
    if not converged:
        _, alpha, lam = best
    return alpha, lam, iters, converged


def _lipschitz_estimate(problem, model, box, seed=0, samples=8):
    rng = np.random.default_rng(seed)
    n, m = problem.n_states, problem.n_actions
    pts = []
    for _ in range(samples):
        a = rng.dirichlet(np.ones(m))
        l = rng.uniform(-box.bound, box.bound, size=n)
        v, G = evaluate(problem, model, l)
        field_vec = np.concatenate([-v, 1.0 - a @ G])
        pts.append((np.concatenate([a, l]), field_vec))
    lhat = 1e-9
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dz = np.linalg.norm(pts[i][0] - pts[j][0])
            df = np.linalg.norm(pts[i][1] - pts[j][1])
            if dz > 1e-12:
                lhat = max(lhat, df / dz)
    return lhat


def _mirror_prox_backend(problem, model, opts, box):
    n, m = problem.n_states, problem.n_actions
    prior = problem.prior
    alpha = _init_alpha(m, opts.seed)
    lam = np.zeros(n)
    eta = 1.0 / (2.0 * _lipschitz_estimate(problem, model, box, seed=opts.seed))

    def alpha_prox(a, direction):
        out = a * np.exp(direction - direction.max())
        return out / out.sum()

    def lam_prox(l, grad):
        out = np.clip(l - eta * grad, -box.bound, box.bound)
        if model.translation_invariant:
            out = out - out.sum() * prior
        return out

    best = (math.inf, alpha.copy(), lam.copy())
    iters = 0
    converged = False
    for k in range(1, opts.max_iter + 1):
        iters = k
        v, G = evaluate(problem, model, lam)
        g_l = 1.0 - alpha @ G
        a_half = alpha_prox(alpha, eta * v)
        l_half = lam_prox(lam, g_l)
        v2, G2 = evaluate(problem, model, l_half)
        g_l2 = 1.0 - a_half @ G2
        alpha = alpha_prox(alpha, eta * v2)
        lam = lam_prox(lam, g_l2)
        if k % 10 == 0 or k == opts.max_iter:
            res_a, res_l, v3, _ = foc_residuals(problem, model, alpha, lam)
            score = max(res_a, res_l)
            if score < best[0]:
                best = (score, alpha.copy(), lam.copy())
            if score <= opts.tol:
                converged = True
                break
            if opts.polish and k % 200 == 0:
                got = _polish(problem, model, alpha, lam, _support_guess(alpha, v3), opts.tol)
                if got is not None:
                    alpha, lam = got
                    res_a, res_l, _, _ = foc_residuals(problem, model, alpha, lam)
                    best = (max(res_a, res_l), alpha.copy(), lam.copy())
                    converged = max(res_a, res_l) <= opts.tol
                    break
    if opts.polish and not converged:
        _, alpha, lam = best
        _, _, v3, _ = foc_residuals(problem, model, alpha, lam)
        got = _polish(problem, model, alpha, lam, _support_guess(alpha, v3), opts.tol)
        if got is not None:
            alpha, lam = got
            res_a, res_l, _, _ = foc_residuals(problem, model, alpha, lam)
            if max(res_a, res_l) <= opts.tol:
                converged = True
                best = (max(res_a, res_l), alpha.copy(), lam.copy())
    if not converged:
        _, alpha, lam = best
    return alpha, lam, iters, converged


# ---------------------------------------------------------------------------
# assembling solutions


def _assemble(problem, model, alpha, lam, iters, converged, backend, box, extra=None):
    res_a, res_l, v, G = foc_residuals(problem, model, alpha, lam)
    value = float(alpha @ v + lam.sum())
    raw_rows = (alpha[None, :] * G.T).astype(float)
    row_err = float(np.max(np.abs(raw_rows.sum(axis=1) - 1.0)))
    rows = np.maximum(raw_rows, 0.0)
    sums = rows.sum(axis=1, keepdims=True)
    sums[sums <= 0.0] = 1.0
    rows = rows / sums
    rule = ChoiceRule.build(problem, rows)
    gap = duality_certificate(problem, model, alpha, lam, box)
    diagnostics = {
        "row_sum_error": row_err,
        "alpha_floor": float(alpha.min()),
    }
    if extra:
        diagnostics.update(extra)
    if box is not None:
        lam_check = lam - lam.sum() * problem.prior if box.translation_slice else lam
        diagnostics["box_contains_multiplier"] = (
            None if box.reduced else box.contains(lam_check)
        )
    return Solution(
        problem=problem,
        model=model,
        alpha=alpha,
        lam=lam,
        rule=rule,
        value=value,
        gap=gap,
        residual_alpha=res_a,
        residual_lambda=res_l,
        converged=converged,
        iterations=iters,
        backend=backend,
        box=box,
        diagnostics=diagnostics,
    )


def duality_certificate(problem, model, alpha, lam, box=None) -> float:
    """Upper-minus-lower bound from one exact best response on each side."""
    v, _ = evaluate(problem, model, lam)
    upper = float(v.max() + lam.sum())
    lam_best = _inner_minimize(problem, model, alpha, lam.copy(), box)
    v2, _ = evaluate(problem, model, lam_best)
    lower = float(alpha @ v2 + lam_best.sum())
    return upper - lower


def solve(problem: DecisionProblem, model: CostModel, opts: SolveOptions | None = None) -> Solution:
    """Find a saddle point and reconstruct the optimal stochastic choice rule."""
    opts = opts or SolveOptions()
    if model.prior.shape != problem.prior.shape or np.max(np.abs(model.prior - problem.prior)) > 1e-12:
        raise ValidationError("cost model and problem must share the prior")
    if isinstance(model, PerceptualCsiszarCost) and opts.backend == "closed_form_auto":
        return solve_perceptual(problem, model.transform, model.encoder, opts)
    box = multiplier_bounds(problem, model)
    if opts.box_override is not None:
        box = replace(box, bound=float(opts.box_override), detail="user override")
    symmetric = False
    if opts.exploit_symmetry and problem.n_states <= 8:
        group = detect_symmetries(problem)
        symmetric = len(group) > 1 and is_transitive_on_states(group, problem.n_states)

    backend = opts.backend
    if backend == "closed_form_auto":
        if isinstance(model, CsiszarCost) and model.transform.family == "shannon":
            return solve_mutual_information(problem, model.transform.params["kappa"], opts)
        backend = "best_response"

    for attempt in range(2):
        if backend == "best_response":
            alpha, lam, iters, converged = _best_response_backend(problem, model, opts, box)
        else:
            alpha, lam, iters, converged = _mirror_prox_backend(problem, model, opts, box)
        lam_check = lam - lam.sum() * problem.prior if box.translation_slice else lam
        if box.reduced or box.contains(lam_check):
            break
        if attempt == 1:
            raise SolverError("multiplier escaped the enlarged search box")
        box = replace(box, bound=box.bound * 10.0, detail="enlarged after box violation")
    return _assemble(
        problem,
        model,
        alpha,
        lam,
        iters,
        converged,
        backend,
        box,
        extra={"symmetric_problem": symmetric},
    )


# ---------------------------------------------------------------------------
# mutual information: multiplicative fixed point on the action distribution


def _lse_vec(v):
    mx = v.max()
    return mx + math.log(np.exp(v - mx).sum())


def solve_mutual_information(
    problem: DecisionProblem, kappa: float = 1.0, opts: SolveOptions | None = None
) -> Solution:
    """Entropy-cost solver via multiplicative updates on the action distribution.

    Iterates ``alpha'(a) proportional to alpha(a) exp(c_a - 1)`` with
    ``c_a = P_pi(a) / alpha(a)`` computed from the exponential-payoff rule,
    falling back to the plain averaging step whenever the concave reduced
    objective would not improve.  At the fixed point alpha equals the
    unconditional action distribution.
    """
    opts = opts or SolveOptions()
    if kappa <= 0:
        raise ValidationError("kappa must be positive")
    n, m = problem.n_states, problem.n_actions
    prior = problem.prior
    logits = problem.payoffs.T / kappa  # (n, m)
    alpha = _init_alpha(m, opts.seed)
    fp_tol = 1e-10

    def reduced_objective(log_a):
        M = log_a[None, :] + logits
        mx = M.max(axis=1)
        lse = mx + np.log(np.exp(M - mx[:, None]).sum(axis=1))
        return kappa * float(prior @ lse), lse

    log_alpha = np.log(alpha)
    obj, lse = reduced_objective(log_alpha)
    converged = False
    iters = 0
    for iters in range(1, opts.max_iter + 1):
        P = np.exp(log_alpha[None, :] + logits - lse[:, None])
        ppi = prior @ P
        alpha = np.exp(log_alpha)
        alpha /= alpha.sum()
        if float(np.abs(ppi - alpha).max()) <= fp_tol:
            converged = True
            break
        ratio = ppi / np.maximum(alpha, 1e-300)
        cand = log_alpha + (ratio - 1.0)
        cand -= _lse_vec(cand)
        cand_obj, cand_lse = reduced_objective(cand)
        if cand_obj < obj - 1e-13:
            # safeguard: fall back to the averaging step, which never decreases
            cand = np.log(np.maximum(ppi, 1e-300))
            cand -= _lse_vec(cand)
            cand_obj, cand_lse = reduced_objective(cand)
        log_alpha, obj, lse = cand, cand_obj, cand_lse

    lam = kappa * prior * lse
    model = mutual_information_cost(prior, kappa)
    box = multiplier_bounds(problem, model)
    sol = _assemble(
        problem,
        model,
        alpha,
        lam,
        iters,
        converged,
        "blahut_arimoto",
        box,
        extra={"alpha_vs_unconditional": float(np.abs(prior @ np.exp(log_alpha[None, :] + logits - lse[:, None]) - alpha).max())},
    )
    return sol


# ---------------------------------------------------------------------------
# perceptual costs: reduction to the attribute problem


def _reduced_problem(problem: DecisionProblem, encoder):
    """Project actions onto attribute space, merging payoff-identical images."""
    E = problem.payoffs @ encoder.mu.T  # (m, n_attr): E_i[a]
    groups: dict[bytes, list[int]] = {}
    order = []
    for a in range(problem.n_actions):
        key = np.round(E[a], 12).tobytes()
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(a)
    reduced_payoffs = np.array([E[groups[key][0]] for key in order])
    names = tuple("+".join(problem.action_names[i] for i in groups[key]) for key in order)
    reduced = validate_problem(
        encoder.attributes,
        encoder.nu,
        list(zip(names, reduced_payoffs)),
    )
    group_lists = [groups[key] for key in order]
    return reduced, group_lists, E


def solve_perceptual(
    problem: DecisionProblem,
    transform: Transform,
    encoder,
    opts: SolveOptions | None = None,
) -> Solution:
    """Two-step solver for attribute-mediated costs.

    Solves the reduced problem on attributes under the statewise-separable
    cost, then lifts the attribute-contingent rule through the encoder.
    Duplicate attribute images are merged and split uniformly on the lift;
    the lifted rule obeys |P_s(a) - P_t(a)| <= ||K_s - K_t||_1.
    """
    opts = opts or SolveOptions()
    reduced, groups, _ = _reduced_problem(problem, encoder)
    inner_model = csiszar_cost(reduced.prior, transform)
    inner_opts = replace_options(opts, backend="best_response")
    rsol = solve(reduced, inner_model, inner_opts)

    m = problem.n_actions
    Q = rsol.rule.rows  # (n_attr, n_reduced)
    rows = np.zeros((problem.n_states, m))
    alpha = np.zeros(m)
    for g_idx, members in enumerate(groups):
        share = 1.0 / len(members)
        lifted = encoder.rows @ Q[:, g_idx]
        for a in members:
            rows[:, a] = lifted * share
            alpha[a] = rsol.alpha[g_idx] * share
    rule = ChoiceRule.build(problem, rows)

    model = PerceptualCsiszarCost(problem.prior, transform, encoder)
    diagnostics = {
        "merged_groups": [list(g) for g in groups if len(g) > 1],
        "reduced_value": rsol.value,
        "reduced_converged": rsol.converged,
        "continuity_bound_ok": _continuity_ok(rows, encoder.rows),
    }
    if encoder.full_column_rank:
        lam_bar_nu = rsol.lam / reduced.prior
        lam_pi, *_ = np.linalg.lstsq(encoder.mu, lam_bar_nu, rcond=None)
        lam = lam_pi * problem.prior
        res_a, res_l, v, G = foc_residuals(problem, model, alpha, lam)
        value = float(alpha @ v + lam.sum())
        diagnostics["lift_residuals"] = (res_a, res_l)
        return Solution(
            problem=problem,
            model=model,
            alpha=alpha,
            lam=lam,
            rule=rule,
            value=value,
            gap=rsol.gap,
            residual_alpha=res_a,
            residual_lambda=res_l,
            converged=rsol.converged,
            iterations=rsol.iterations,
            backend="perceptual_two_step",
            box=replace(rsol.box, reduced=True),
            diagnostics=diagnostics,
        )
    diagnostics["dual_surface"] = "unavailable: encoder is rank deficient"
    return Solution(
        problem=problem,
        model=model,
        alpha=alpha,
        lam=rsol.lam,  # attribute-space multiplier; see diagnostics
        rule=rule,
        value=rsol.value,
        gap=rsol.gap,
        residual_alpha=rsol.residual_alpha,
        residual_lambda=rsol.residual_lambda,
        converged=rsol.converged,
        iterations=rsol.iterations,
        backend="perceptual_two_step",
        box=replace(rsol.box, reduced=True),
        diagnostics=diagnostics,
    )


def _continuity_ok(rows, K):
    n = rows.shape[0]
    for s in range(n):
        for t in range(s + 1, n):
            bound = float(np.abs(K[s] - K[t]).sum())
            if np.max(np.abs(rows[s] - rows[t])) > bound + 1e-9:
                return False
    return True


def replace_options(opts: SolveOptions, **kw) -> SolveOptions:
    data = {
        "backend": opts.backend,
        "tol": opts.tol,
        "max_iter": opts.max_iter,
        "box_override": opts.box_override,
        "seed": opts.seed,
        "exploit_symmetry": opts.exploit_symmetry,
        "polish": opts.polish,
    }
    data.update(kw)
    return SolveOptions(**data)


# ---------------------------------------------------------------------------
# support reduction


def reduce_support(problem, model, alpha, lam, sv_tol: float = 1e-9):
    """Shrink the support of alpha without changing the multiplier or value.

    Moves alpha along null directions of the stacked gradient system (with a
    mass-conservation row for costs that are not translation invariant) until
    the support is at most n_states + 1, or n_states in the translation-
    invariant case.  Idempotent once the bound is met.
    """
    alpha = np.asarray(alpha, dtype=float).copy()
    n = problem.n_states
    bound = n if model.translation_invariant else n + 1
    _, G = evaluate(problem, model, lam)
    guard = 0
    while guard < problem.n_actions + 2:
        guard += 1
        S = np.flatnonzero(alpha > 1e-14)
        if S.size <= bound:
            break
        rows = [G[S].T]  # n rows of gradients
        if not model.translation_invariant:
            rows.append(np.ones((1, S.size)))
        M = np.vstack(rows)
        _, sv, vt = np.linalg.svd(M)
        cutoff = sv_tol * (sv[0] if sv.size else 1.0)
        rank = int((sv > cutoff).sum())
        if rank >= vt.shape[0]:
            break
        beta = vt[-1]
        if beta.max() <= 0:
            beta = -beta
        pos = beta > 1e-15
        if not np.any(pos):
            break
        t = np.min(alpha[S][pos] / beta[pos])
        upd = alpha[S] - t * beta
        upd[upd < 1e-15] = 0.0
        alpha[S] = upd
        total = alpha.sum()
        alpha = alpha / total
    return alpha


def reduce_solution(sol: Solution) -> Solution:
    alpha = reduce_support(sol.problem, sol.model, sol.alpha, sol.lam)
    out = _assemble(
        sol.problem,
        sol.model,
        alpha,
        sol.lam,
        sol.iterations,
        sol.converged,
        sol.backend,
        sol.box,
        extra={**sol.diagnostics, "support_reduced": True},
    )
    return out


__all__ = [
    "SolveOptions",
    "MultiplierBox",
    "Solution",
    "SolverError",
    "solve",
    "solve_mutual_information",
    "solve_perceptual",
    "multiplier_bounds",
    "statewise_multiplier",
    "chi2_multiplier",
    "reduce_support",
    "reduce_solution",
    "duality_certificate",
    "foc_residuals",
    "payoff_arguments",
    "saddle_value",
    "evaluate",
    "replace_options",
]
