//! Human-readable and machine-readable rendering.

use super::{Expr, ExprKind};
use crate::graph::{NodeId, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: RenderFormat,
    /// Print Q-factors as `Q[{..}]` instead of expanding their derivation.
    pub collapse_q: bool,
    /// Print variable values in lower case, as in `P(y|x)`, whenever that
    /// does not merge two names.
    pub lowercase: bool,
}

impl RenderOptions {
    pub fn text() -> Self {
        RenderOptions {
            format: RenderFormat::Text,
            collapse_q: false,
            lowercase: true,
        }
    }

    pub fn latex() -> Self {
        RenderOptions {
            format: RenderFormat::Latex,
            ..Self::text()
        }
    }

    pub fn json() -> Self {
        RenderOptions {
            format: RenderFormat::Json,
            ..Self::text()
        }
    }

    pub fn for_format(format: RenderFormat) -> Self {
        RenderOptions { format, ..Self::text() }
    }
}

pub fn render(e: &Expr, names: &[String], format: RenderFormat) -> String {
    render_with(e, names, &RenderOptions::for_format(format))
}

pub fn render_with(e: &Expr, names: &[String], opts: &RenderOptions) -> String {
    if opts.format == RenderFormat::Json {
        let json = super::json::expr_to_json(e, names);
        return serde_json::to_string(&json).expect("expression json serializes");
    }
    let shown = display_names(names, opts.lowercase);
    let namer = |v: NodeId| shown[v].clone();
    render_text_like(e, &namer, opts)
}

pub(crate) fn display_names(names: &[String], lowercase: bool) -> Vec<String> {
    if lowercase {
        let lower: Vec<String> = names.iter().map(|n| n.to_lowercase()).collect();
        let mut sorted = lower.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == lower.len() {
            return lower;
        }
    }
    names.to_vec()
}

pub(crate) fn render_text_like(e: &Expr, namer: &dyn Fn(NodeId) -> String, opts: &RenderOptions) -> String {
    let r = Renderer {
        namer,
        latex: opts.format == RenderFormat::Latex,
        collapse_q: opts.collapse_q,
    };
    r.go(e)
}

struct Renderer<'a> {
    namer: &'a dyn Fn(NodeId) -> String,
    latex: bool,
    collapse_q: bool,
}

impl Renderer<'_> {
    fn list(&self, s: &VarSet) -> String {
        s.iter().map(|v| (self.namer)(v)).collect::<Vec<_>>().join(",")
    }

    fn upper_list(&self, s: &VarSet) -> String {
        s.iter()
            .map(|v| (self.namer)(v).to_uppercase())
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn sigma(&self, over: &VarSet) -> String {
        let vars = self.list(over);
        match (self.latex, over.len()) {
            (true, _) => format!("\\sum_{{{vars}}} "),
            (false, 1) => format!("Σ_{vars} "),
            (false, _) => format!("Σ_{{{vars}}} "),
        }
    }

    fn bracket(&self, s: String) -> String {
        if self.latex {
            format!("\\left[{s}\\right]")
        } else {
            format!("[{s}]")
        }
    }

    fn is_atomic(&self, e: &Expr) -> bool {
        match e.kind() {
            ExprKind::One | ExprKind::Factor { .. } => true,
            ExprKind::Q { body, .. } => self.collapse_q || self.is_atomic(body),
            ExprKind::Product(ts) => ts.len() <= 1 && ts.iter().all(|t| self.is_atomic(t)),
            _ => false,
        }
    }

    /// Rendered with its own brackets: an expanded Q-factor.
    fn is_grouped(&self, e: &Expr) -> bool {
        matches!(e.kind(), ExprKind::Q { body, .. } if !self.collapse_q && !self.is_atomic(body))
    }

    fn go(&self, e: &Expr) -> String {
        match e.kind() {
            ExprKind::One => "1".into(),
            ExprKind::Factor { var, given } => {
                let v = (self.namer)(*var);
                match (given.is_empty(), self.latex) {
                    (true, _) => format!("P({v})"),
                    (false, false) => format!("P({v}|{})", self.list(given)),
                    (false, true) => format!("P({v} \\mid {})", self.list(given)),
                }
            }
            ExprKind::Product(terms) => {
                if terms.is_empty() {
                    return "1".into();
                }
                let n = terms.len();
                terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let s = self.go(t);
                        let trailing_sum = i + 1 == n && matches!(t.kind(), ExprKind::Sum { .. });
                        let latex_frac = self.latex && matches!(t.kind(), ExprKind::Quotient { .. });
                        if self.is_atomic(t) || self.is_grouped(t) || trailing_sum || latex_frac {
                            s
                        } else {
                            self.bracket(s)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            ExprKind::Sum { over, body } => format!("{}{}", self.sigma(over), self.go(body)),
            ExprKind::Quotient { numerator, denominator } => {
                let (n, d) = (self.go(numerator), self.go(denominator));
                if self.latex {
                    format!("\\frac{{{n}}}{{{d}}}")
                } else {
                    let wrap = |e: &Expr, s: String| {
                        if self.is_atomic(e) || self.is_grouped(e) {
                            s
                        } else {
                            format!("({s})")
                        }
                    };
                    format!("{} / {}", wrap(numerator, n), wrap(denominator, d))
                }
            }
            ExprKind::Q { scope, body } => {
                if self.collapse_q {
                    if self.latex {
                        format!("Q[\\{{{}\\}}]", self.upper_list(scope))
                    } else {
                        format!("Q[{{{}}}]", self.upper_list(scope))
                    }
                } else if self.is_atomic(body) || self.is_grouped(body) {
                    self.go(body)
                } else {
                    self.bracket(self.go(body))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["X", "Z", "Y"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn factor_text() {
        let e = Expr::factor(1, VarSet::singleton(0));
        assert_eq!(render(&e, &names(), RenderFormat::Text), "P(z|x)");
        assert_eq!(render(&e, &names(), RenderFormat::Latex), "P(z \\mid x)");
    }

    #[test]
    fn sums_and_quotients() {
        let pz = Expr::factor(1, VarSet::singleton(0));
        let py = Expr::factor(2, [0, 1].into_iter().collect());
        let s = Expr::sum(VarSet::singleton(1), Expr::product(vec![pz, py.clone()]));
        assert_eq!(render(&s, &names(), RenderFormat::Text), "Σ_z P(z|x) P(y|x,z)");
        let q = Expr::quotient(s.clone(), Expr::sum([1, 2].into_iter().collect(), py));
        assert_eq!(
            render(&q, &names(), RenderFormat::Text),
            "(Σ_z P(z|x) P(y|x,z)) / (Σ_{z,y} P(y|x,z))"
        );
        assert!(render(&q, &names(), RenderFormat::Latex).starts_with("\\frac{\\sum_{z} "));
    }

    #[test]
    fn collapsed_q() {
        let body = Expr::product(vec![
            Expr::factor(0, VarSet::new()),
            Expr::factor(2, VarSet::singleton(0)),
        ]);
        let q = Expr::q([0, 2].into_iter().collect(), body);
        let opts = RenderOptions {
            collapse_q: true,
            ..RenderOptions::text()
        };
        assert_eq!(render_with(&q, &names(), &opts), "Q[{X, Y}]");
        assert_eq!(render(&q, &names(), RenderFormat::Text), "[P(x) P(y|x)]");
    }

    #[test]
    fn keeps_case_when_lowercase_collides() {
        let n: Vec<String> = ["a", "A"].iter().map(|s| s.to_string()).collect();
        let e = Expr::factor(1, VarSet::singleton(0));
        assert_eq!(render(&e, &n, RenderFormat::Text), "P(A|a)");
    }
}
