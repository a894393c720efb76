//! The sum-to-one rewrite and free-variable averaging.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Expr, ExprKind, ExprRef};
use crate::graph::VarSet;

/// The variables a term is normalized over: `P(v|..)` sums to 1 over `v`,
/// and a Q-factor sums to 1 over its scope.
fn normalized_scope(e: &Expr) -> Option<VarSet> {
    match e.kind() {
        ExprKind::Factor { var, .. } => Some(VarSet::singleton(*var)),
        ExprKind::Q { scope, .. } if !scope.is_empty() => Some(scope.clone()),
        _ => None,
    }
}

/// Replace sums of normalized terms by 1.
///
/// Inside `Σ_over Π terms`, a term normalized over `S ⊆ over` whose `S` is
/// free in no other term is dropped together with `S`. This repeats until
/// nothing more can be removed, then `Π ∅` and `x / 1` are tidied away.
/// The result evaluates to the same value as the input on every strictly
/// positive table.
pub fn sum_to_one_eliminate(e: &ExprRef) -> ExprRef {
    Rewriter::default().go(e)
}

#[derive(Default)]
struct Rewriter {
    memo: HashMap<*const Expr, (ExprRef, ExprRef)>,
}

impl Rewriter {
    fn go(&mut self, e: &ExprRef) -> ExprRef {
        let key = Arc::as_ptr(e);
        if let Some((_, out)) = self.memo.get(&key) {
            return out.clone();
        }
        let out = match e.kind() {
            ExprKind::One | ExprKind::Factor { .. } => e.clone(),
            ExprKind::Product(ts) => {
                let terms: Vec<ExprRef> = ts.iter().map(|t| self.go(t)).collect();
                tidy_product(terms)
            }
            ExprKind::Quotient { numerator, denominator } => {
                let (n, d) = (self.go(numerator), self.go(denominator));
                if d.is_one() {
                    n
                } else if Arc::ptr_eq(&n, numerator) && Arc::ptr_eq(&d, denominator) {
                    e.clone()
                } else {
                    Expr::quotient(n, d)
                }
            }
            ExprKind::Q { scope, body } => {
                let b = self.go(body);
                if Arc::ptr_eq(&b, body) {
                    e.clone()
                } else if b.is_one() {
                    b
                } else {
                    Expr::q(scope.clone(), b)
                }
            }
            ExprKind::Sum { over, body } => {
                let b = self.go(body);
                collapse_sum(over.clone(), b)
            }
        };
        self.memo.insert(key, (e.clone(), out.clone()));
        out
    }
}

fn flatten_into(terms: &mut Vec<ExprRef>, e: ExprRef) {
    match e.kind() {
        ExprKind::One => {}
        ExprKind::Product(ts) => {
            for t in ts {
                flatten_into(terms, t.clone());
            }
        }
        _ => terms.push(e),
    }
}

fn tidy_product(parts: Vec<ExprRef>) -> ExprRef {
    let mut terms = Vec::with_capacity(parts.len());
    for p in parts {
        flatten_into(&mut terms, p);
    }
    match terms.len() {
        0 => Expr::one(),
        1 => terms.pop().unwrap(),
        _ => Expr::product(terms),
    }
}

fn collapse_sum(mut over: VarSet, mut body: ExprRef) -> ExprRef {
    // Merge directly nested sums over disjoint variables.
    while let ExprKind::Sum { over: inner, body: b } = body.kind() {
        if !inner.is_disjoint(&over) {
            break;
        }
        over.union_with(inner);
        body = b.clone();
    }
    let mut terms = Vec::new();
    flatten_into(&mut terms, body);

    loop {
        let hit = (0..terms.len()).find(|&i| {
            let Some(scope) = normalized_scope(&terms[i]) else {
                return false;
            };
            scope.is_subset(&over)
                && terms
                    .iter()
                    .enumerate()
                    .all(|(j, t)| j == i || t.free_vars().is_disjoint(&scope))
        });
        match hit {
            Some(i) => {
                let t = terms.remove(i);
                over = over.difference(&normalized_scope(&t).unwrap());
            }
            None => break,
        }
    }
    Expr::sum(over, tidy_product(terms))
}

/// Average `e` over `vars` with weights `Π_{v ∈ vars} P(v)`.
///
/// When `e` does not depend on `vars` on the tables of interest, the result
/// has the same value but no longer has `vars` free.
pub fn weight_out(e: &ExprRef, vars: &VarSet) -> ExprRef {
    let vars = vars.intersection(e.free_vars());
    if vars.is_empty() {
        return e.clone();
    }
    let mut terms = vec![e.clone()];
    terms.extend(vars.iter().map(|v| Expr::factor(v, VarSet::new())));
    Expr::sum(vars, Expr::product(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, Assignment, JointTable};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vs(ids: &[usize]) -> VarSet {
        ids.iter().copied().collect()
    }

    fn random_table(n: usize, seed: u64) -> JointTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
        let drift = 1.0 - p.iter().sum::<f64>();
        p[0] += drift;
        JointTable::new((0..n).collect(), vec![2; n], p).unwrap()
    }

    #[test]
    fn normalized_factor_sums_away() {
        // Σ_y P(y|x) → 1
        let e = Expr::sum(vs(&[1]), Expr::factor(1, vs(&[0])));
        assert!(sum_to_one_eliminate(&e).is_one());
    }

    #[test]
    fn nothing_to_do() {
        let e = Expr::sum(vs(&[0]), Expr::factor(1, vs(&[0])));
        assert_eq!(sum_to_one_eliminate(&e), e);
        let f = Expr::factor(1, vs(&[0]));
        assert!(Arc::ptr_eq(&sum_to_one_eliminate(&f), &f));
    }

    #[test]
    fn chained_elimination_and_quotient_cleanup() {
        // (Σ_z P(z|x) Q[y](y,z,x)) / (Σ_y Σ_z P(z|x) Q[y](y,z,x)) → numerator
        let qy = Expr::q(vs(&[2]), Expr::factor(2, vs(&[0, 1])));
        let pz = Expr::factor(1, vs(&[0]));
        let num = Expr::sum(vs(&[1]), Expr::product(vec![pz.clone(), qy.clone()]));
        let den = Expr::sum(vs(&[2]), Expr::sum(vs(&[1]), Expr::product(vec![pz, qy])));
        let out = sum_to_one_eliminate(&Expr::quotient(num.clone(), den));
        assert_eq!(out, num);
    }

    #[test]
    fn blocked_when_scope_is_shared() {
        // Σ_{x,y} P(x|y) P(y|x): neither term can go first.
        let e = Expr::sum(
            vs(&[0, 1]),
            Expr::product(vec![Expr::factor(0, vs(&[1])), Expr::factor(1, vs(&[0]))]),
        );
        assert_eq!(sum_to_one_eliminate(&e), e);
    }

    #[test]
    fn preserves_value_on_random_tables() {
        // Σ_{b,c} P(b|a) Q[c](c|a,b) P(a|b): only the Q-factor can go.
        let body = Expr::product(vec![
            Expr::factor(1, vs(&[0])),
            Expr::q(vs(&[2]), Expr::factor(2, vs(&[0, 1]))),
            Expr::factor(0, vs(&[1])),
        ]);
        let e = Expr::sum(vs(&[1, 2]), body);
        let s = sum_to_one_eliminate(&e);
        assert_ne!(s, e);
        for seed in 0..20 {
            let t = random_table(3, seed);
            for a in 0..2 {
                let asg: Assignment = [(0, a)].into_iter().collect();
                let (x, y) = (evaluate(&e, &t, &asg).unwrap(), evaluate(&s, &t, &asg).unwrap());
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn weight_out_removes_free_vars() {
        let e = Expr::factor(1, vs(&[0, 2]));
        let w = weight_out(&e, &vs(&[2, 3]));
        assert_eq!(w.free_vars(), &vs(&[0, 1]));
        assert!(Arc::ptr_eq(&weight_out(&e, &VarSet::new()), &e));
    }
}
