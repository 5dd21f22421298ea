use arctic_core::asymptotics::{exponent_set, free_energy};
use arctic_core::enumerate::{count_aztec_triangle, enumerate_vertex_model, MAX_N_20V, MAX_N_6V, MAX_N_6VP, MAX_N_DT};
use arctic_core::partition::{one_point, partition_fn, z20v_formula};
use arctic_core::paths::{path_partition_closed, path_partition_dp};
use arctic_core::{Model, ModelParams, Mp, NamedPoint};

use crate::args::{RunConfig, TableKind};
use crate::error::{CliError, CliResult};

/// Header plus rows of decimal strings.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(cols: &[&str]) -> Table {
        Table { header: cols.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> CliResult<String> {
        let objs: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| self.header.iter().cloned().zip(r.iter().map(|v| serde_json::Value::String(v.clone()))).collect())
            .collect();
        Ok(serde_json::to_string_pretty(&objs)? + "\n")
    }
}

fn is_uniform_20v(p: &ModelParams) -> bool {
    let u = NamedPoint::Uniform20V.params(p.prec());
    matches!(p.model, Model::TwentyV | Model::Dt)
        && Mp::rel_diff(&p.eta, &u.eta).to_f64() < 1e-30
        && Mp::rel_diff(&p.u, &u.u).to_f64() < 1e-30
        && Mp::rel_diff(&p.v, &u.v).to_f64() < 1e-30
        && Mp::rel_diff(&p.nu, &u.nu).to_f64() < 1e-30
}

/// Sizes at which the partition table adds a brute-force column.
fn enumeration_cap(model: Model) -> usize {
    match model {
        Model::SixV => MAX_N_6V.min(5),
        Model::SixVP => MAX_N_6VP.min(3),
        Model::TwentyV => MAX_N_20V.min(3),
        Model::Dt => MAX_N_DT,
    }
}

pub fn tabulate(kind: TableKind, cfg: &RunConfig) -> CliResult<Table> {
    let d = cfg.digits;
    let p = cfg.require_params()?;
    let ns = |default: &[usize]| if cfg.ns.is_empty() { default.to_vec() } else { cfg.ns.clone() };
    match kind {
        TableKind::Partition => {
            let mut t = Table::new(&["model", "n", "Z", "formula", "enumeration"]);
            let uniform = is_uniform_20v(p);
            for n in ns(&[1, 2, 3, 4, 5, 6]) {
                let prec = cfg.prec.max(arctic_core::trig_core::default_precision(n));
                let q = p.at_precision(prec);
                let formula = if uniform { z20v_formula(n).to_string() } else { String::new() };
                let z = if p.model == Model::Dt { formula.clone() } else { partition_fn(&q, n)?.to_sig(d) };
                let enumeration = if n > enumeration_cap(p.model) {
                    String::new()
                } else if p.model == Model::Dt {
                    count_aztec_triangle(n)?.total.to_string()
                } else {
                    enumerate_vertex_model(&q, n)?.total.to_sig(d)
                };
                t.rows.push(vec![p.model.name().into(), n.to_string(), z, formula, enumeration]);
            }
            Ok(t)
        }
        TableKind::OnePoint => {
            let mut t = Table::new(&["model", "n", "xi", "H"]);
            for n in ns(&[4]) {
                for xi in cfg.xi_values("-0.5..0")? {
                    let h = one_point(p, n, &xi)?;
                    t.rows.push(vec![p.model.name().into(), n.to_string(), xi.to_sig(d), h.to_sig(d)]);
                }
            }
            Ok(t)
        }
        TableKind::Refined => {
            let mut t = Table::new(&["model", "n", "k", "Z_nk"]);
            for n in ns(&[3]) {
                if p.model == Model::Dt {
                    let c = count_aztec_triangle(n)?;
                    for (k, z) in c.by_exit.iter().enumerate() {
                        t.rows.push(vec!["dt".into(), n.to_string(), k.to_string(), z.to_string()]);
                    }
                } else {
                    let c = enumerate_vertex_model(p, n)?;
                    for (k, z) in c.by_exit.iter().enumerate() {
                        t.rows.push(vec![p.model.name().into(), n.to_string(), (k + 1).to_string(), z.to_sig(d)]);
                    }
                }
            }
            Ok(t)
        }
        TableKind::Path => {
            let mut t = Table::new(&["model", "k", "l", "closed", "transfer"]);
            let kmax = ns(&[10]).into_iter().max().unwrap_or(10) as i64;
            for k in 0..=kmax {
                for l in 0..=kmax {
                    let a = path_partition_closed(p, k, l)?;
                    let b = path_partition_dp(p, k, l)?;
                    t.rows.push(vec![p.model.name().into(), k.to_string(), l.to_string(), a.to_sig(d), b.to_sig(d)]);
                }
            }
            Ok(t)
        }
        TableKind::FreeEnergy => {
            let mut t = Table::new(&["model", "eta", "u", "v", "f"]);
            let f = free_energy(p)?;
            t.rows.push(vec![p.model.name().into(), p.eta.to_sig(d), p.u.to_sig(d), p.v.to_sig(d), f.to_sig(d)]);
            Ok(t)
        }
        TableKind::Exponent => {
            let mut t = Table::new(&["model", "xi", "f", "psi", "phi"]);
            for xi in cfg.xi_values("-0.5..-0.05")? {
                let e = exponent_set(p, &xi)?;
                t.rows.push(vec![p.model.name().into(), xi.to_sig(d), e.f.to_sig(d), e.psi.to_sig(d), e.phi.to_sig(d)]);
            }
            Ok(t)
        }
    }
    .map_err(|e: CliError| e)
}
