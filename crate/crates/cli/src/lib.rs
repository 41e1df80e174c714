//! Command-line front end for `gooddeal-core`.
//!
//! Every command returns a JSON value together with its exit code:
//! 0 holds, 1 fails, 2 inconclusive, 64 usage, 65 numeric status.

pub mod cases;
pub mod error;
pub mod measure;
pub mod render;
pub mod schema;

use gooddeal_core::diagnostics::{self, CheckOptions};
use gooddeal_core::risk::{axioms_check, indifference_price, superhedging_rho0};
use gooddeal_core::space::{luxemburg_norm, Claim};
use gooddeal_core::{DiagnosticReport, Extended, MarketModel};
use serde_json::{json, Value};

pub use error::CliError;
use measure::MeasureSpec;
use schema::{MarketFile, YoungSpec};

/// Checks accepted by `check`.
pub use gooddeal_core::diagnostics::CHECK_NAMES;

pub struct Output {
    pub value: Value,
    pub code: i32,
    /// Human rendering for `--table`.
    pub table: String,
}

impl Output {
    fn object(value: Value, code: i32) -> Self {
        let table = render::object_table(&value);
        Output { value, code, table }
    }

    fn report(r: &DiagnosticReport) -> Self {
        Output::object(render::report(r), r.verdict.exit_code())
    }
}

/// A loaded market file and the model it describes.
pub struct Loaded {
    pub file: MarketFile,
    pub market: MarketModel,
}

impl Loaded {
    pub fn from_path(path: &str) -> Result<Self, CliError> {
        let file = MarketFile::load(path)?;
        let market = file.build()?;
        Ok(Loaded { file, market })
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let file = MarketFile::parse(text)?;
        let market = file.build()?;
        Ok(Loaded { file, market })
    }

    /// A claim named in the file, inline JSON (`[-0.5, 0]`) or a comma list.
    pub fn claim(&self, text: &str) -> Result<Vec<f64>, CliError> {
        let t = text.trim();
        let values = if let Some(c) = self.file.claims.get(t) {
            c.clone()
        } else if t.starts_with('[') {
            serde_json::from_str(t).map_err(|e| CliError::Usage(format!("claim: {e}")))?
        } else {
            t.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("unknown claim {t:?}"))))
                .collect::<Result<_, _>>()?
        };
        if values.len() != self.market.dim() {
            return Err(CliError::Usage(format!("claim has {} entries, the space has {} atoms", values.len(), self.market.dim())));
        }
        Claim::new(values.clone())?;
        Ok(values)
    }

    pub fn measure(&self, text: &str) -> Result<std::sync::Arc<dyn gooddeal_core::RiskMeasure>, CliError> {
        MeasureSpec::resolve(text, &self.file.measures)?.build(&self.market)
    }
}

fn neg(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| -v).collect()
}

pub fn cmd_value(loaded: &Loaded, claim: &str, measure: &str, bound: bool) -> Result<Output, CliError> {
    let x = loaded.claim(claim)?;
    let rho = loaded.measure(measure)?;
    let v = rho.evaluate(&x)?;
    let mut out = json!({ "measure": rho.name(), "value": render::extended(v) });
    let mut code = 0;
    if !v.is_finite() {
        out["status"] = json!(render::status(v));
        code = error::EXIT_NUMERIC;
    }
    if bound {
        let lower = rho.evaluate(&x)?.neg();
        let upper = rho.evaluate(&neg(&x))?;
        let r0_lower = superhedging_rho0(&loaded.market, &x)?.neg();
        let r0_upper = superhedging_rho0(&loaded.market, &neg(&x))?;
        out["good_deal_bound"] = json!([render::extended(lower), render::extended(upper)]);
        out["no_arbitrage_bound"] = json!([render::extended(r0_lower), render::extended(r0_upper)]);
    }
    Ok(Output::object(out, code))
}

/// The convex set `B` for `separate`: explicit generators, the
/// `delta`-polytope, or the constant 1.
pub enum BSet {
    Generators(Vec<Vec<f64>>),
    Delta(f64),
    One,
}

pub struct CheckArgs<'a> {
    pub measure: &'a str,
    pub b: BSet,
}

pub fn cmd_check(loaded: &Loaded, name: &str, args: &CheckArgs, opts: &CheckOptions) -> Result<Output, CliError> {
    let m = &loaded.market;
    let report = match name {
        "gdv-exists" => diagnostics::gdv_exists(m)?.0,
        "is-gdv" => diagnostics::is_gdv(loaded.measure(args.measure)?.as_ref(), m, opts)?,
        "relevant" => diagnostics::is_relevant(loaded.measure(args.measure)?.as_ref(), opts)?,
        "nfl" => diagnostics::nfl_check(m)?,
        "coherent" => diagnostics::coherent_gdv(m, opts)?.0,
        "relevant-coherent" => diagnostics::relevant_coherent_gdv(m)?,
        "first-kind" => diagnostics::first_kind_arbitrage(m, opts)?,
        "extension" => diagnostics::extension_consistency(loaded.measure(args.measure)?.as_ref(), m, opts)?,
        "separate" => {
            let gens = match &args.b {
                BSet::Generators(g) => g.clone(),
                BSet::Delta(d) => diagnostics::delta_polytope_vertices(m.space().probs(), *d)?,
                BSet::One => vec![vec![1.0; m.dim()]],
            };
            diagnostics::separate(m, &gens)?.0
        }
        "axioms" => axioms_check(loaded.measure(args.measure)?.as_ref(), opts.samples, opts.seed)?,
        _ => return Err(CliError::Usage(format!("unknown check {name:?}; expected one of {}", CHECK_NAMES.join(", ")))),
    };
    Ok(Output::report(&report))
}

pub fn cmd_papercase(case: &str, size: Option<usize>, opts: &CheckOptions, tol: Option<f64>) -> Result<Output, CliError> {
    let out = cases::run(case, size, opts, tol)?;
    Ok(Output { value: out.to_json(), code: if out.pass() { 0 } else { 1 }, table: out.to_table() })
}

pub fn cmd_indiff(loaded: &Loaded, eta: &str, claim: &str) -> Result<Output, CliError> {
    let x = loaded.claim(claim)?;
    let eta = loaded.measure(eta)?;
    let o = indifference_price(eta.as_ref(), &loaded.market, &x)?;
    let mut out = json!({
        "eta": eta.name(),
        "price": render::extended(o.price),
        "inner_inf": render::extended(o.inner_inf),
        "inner_inf_at_zero": render::extended(o.inner_inf_at_zero),
    });
    let mut code = 0;
    if !o.price.is_finite() {
        out["status"] = json!(if o.inner_inf_at_zero == Extended::NegInf { "not proper" } else { render::status(o.price) });
        code = error::EXIT_NUMERIC;
    }
    Ok(Output::object(out, code))
}

pub fn young(text: &str) -> Result<YoungSpec, CliError> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| CliError::Usage(format!("Young function: {e}")));
    }
    let (head, arg) = t.split_once(':').unwrap_or((t, ""));
    let num = || arg.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("Young function {t:?} needs a number")));
    match head {
        "power" => Ok(YoungSpec::Power { p: num()? }),
        "exp" => Ok(YoungSpec::Exp { gamma: num()? }),
        "capped" => Ok(YoungSpec::Capped),
        _ => Err(CliError::Usage(format!("unknown Young function {t:?}"))),
    }
}

pub fn cmd_norm(loaded: &Loaded, claim: &str, phi: &str) -> Result<Output, CliError> {
    let x = loaded.claim(claim)?;
    let phi = young(phi)?.build()?;
    let v = luxemburg_norm(&phi, loaded.market.space(), &Claim::new(x)?)?;
    Ok(Output::object(json!({ "norm": render::number(v) }), 0))
}
