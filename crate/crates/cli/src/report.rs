use arctic_core::Mp;
use serde::Serialize;

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub check: String,
    pub computed: String,
    pub reference: String,
    /// Where the reference value comes from: enumeration, exact, formula, identity, limit.
    pub source: &'static str,
    pub pass: bool,
}

const DIGITS: usize = 20;

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

impl Check {
    /// `computed` against `reference` to relative `tol`.
    pub fn rel(suite: &'static str, check: impl Into<String>, computed: &Mp, reference: &Mp, tol: f64, source: &'static str) -> Check {
        let r = Mp::rel_diff(computed, reference).to_f64();
        Check {
            suite,
            check: format!("{} (rel {} < {})", check.into(), sci(r), sci(tol)),
            computed: computed.to_sig(DIGITS),
            reference: reference.to_sig(DIGITS),
            source,
            pass: r < tol,
        }
    }

    /// `|residual| < tol`.
    pub fn small(suite: &'static str, check: impl Into<String>, residual: &Mp, tol: f64, source: &'static str) -> Check {
        let r = residual.abs().to_f64();
        Check {
            suite,
            check: check.into(),
            computed: sci(r),
            reference: format!("< {}", sci(tol)),
            source,
            pass: r < tol && residual.is_finite(),
        }
    }

    pub fn equal<T: PartialEq + std::fmt::Display>(suite: &'static str, check: impl Into<String>, computed: &T, reference: &T, source: &'static str) -> Check {
        Check {
            suite,
            check: check.into(),
            computed: computed.to_string(),
            reference: reference.to_string(),
            source,
            pass: computed == reference,
        }
    }

    pub fn boolean(suite: &'static str, check: impl Into<String>, ok: bool, detail: impl Into<String>, source: &'static str) -> Check {
        Check { suite, check: check.into(), computed: detail.into(), reference: "true".into(), source, pass: ok }
    }

    /// A check that could not be evaluated.
    pub fn failed(suite: &'static str, check: impl Into<String>, err: impl std::fmt::Display) -> Check {
        Check {
            suite,
            check: check.into(),
            computed: format!("error: {err}"),
            reference: "-".into(),
            source: "-",
            pass: false,
        }
    }
}

/// Maximum of `|x|` over the residuals, or the first error as a failed check.
pub fn worst<I>(suite: &'static str, check: impl Into<String>, residuals: I, tol: f64, source: &'static str) -> Check
where
    I: IntoIterator<Item = arctic_core::Result<Mp>>,
{
    let check = check.into();
    let mut w: Option<Mp> = None;
    for r in residuals {
        match r {
            Ok(x) => {
                let a = x.abs();
                if !a.is_finite() {
                    return Check::small(suite, check, &a, tol, source);
                }
                if w.as_ref().is_none_or(|b| &a > b) {
                    w = Some(a);
                }
            }
            Err(e) => return Check::failed(suite, check, e),
        }
    }
    match w {
        Some(x) => Check::small(suite, check, &x, tol, source),
        None => Check::failed(suite, check, "no samples"),
    }
}

pub fn render_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        s.push_str(&format!(
            "[{}] {}/{}: computed {} | reference {} | {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.suite,
            c.check,
            c.computed,
            c.reference,
            c.source
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    s.push_str(&format!("{} checks, {} passed, {} failed\n", checks.len(), checks.len() - failed, failed));
    s
}
