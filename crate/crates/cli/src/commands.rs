use std::collections::BTreeMap;
use std::time::Instant;

use lieexp_core::gf::Field;
use lieexp_core::report::{ExactRatio, VerificationReport};
use lieexp_core::rootsys::{verify_series_orbit, SeriesType, MAX_RANK};
use lieexp_core::slcayley::{
    bfs_enumerate, boundary_with_cap, sl_order, BoundaryReport, CayleyGraph, GenSet, SlError,
};
use lieexp_core::spectral::{
    attach_boundary, lambda2_dense, DENSE_MAX, lambda2_iterative, IterOptions, SpectralError, SpectralReport,
};
use lieexp_core::twistsys::verify_twisted_orbit;
use serde::Serialize;

use crate::{CliError, Common, ExportFormat, Mode, Outcome, Series};

impl From<SlError> for CliError {
    fn from(e: SlError) -> Self {
        match e {
            SlError::CapExceeded { .. } | SlError::KeyTooWide { .. } => CliError::Resource(e.to_string()),
            SlError::Spectral(s) => s.into(),
            SlError::Field(_) | SlError::ZeroRank | SlError::SameIndex(_) | SlError::IndexOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::TooLarge { .. } => CliError::Resource(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn field(q: u64) -> Result<Field, CliError> {
    Field::from_order(q).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Serialize)]
struct OrbitSuite {
    pass: bool,
    checked: usize,
    failed: Vec<String>,
    reports: Vec<VerificationReport>,
}

pub fn verify_orbits(series: &[Series], min_rank: Option<usize>, max_rank: usize) -> Result<Outcome, CliError> {
    if max_rank > MAX_RANK {
        return Err(CliError::Config(format!("--max-rank {max_rank} exceeds {MAX_RANK}")));
    }
    let mut reports = Vec::new();
    for s in series {
        match *s {
            Series::Classical(f) => {
                let lo = min_rank.unwrap_or(5).max(f.min_rank());
                for rank in lo..=max_rank {
                    let st = SeriesType::new(f, rank).map_err(|e| CliError::Config(e.to_string()))?;
                    reports.push(verify_series_orbit(st).map_err(|e| CliError::Failed(e.to_string()))?);
                }
            }
            Series::Twisted(ts) => {
                let lo = min_rank.unwrap_or(3).max(ts.min_n());
                for n in lo..=max_rank {
                    let fits = ts.underlying(n).map(|u| u.rank() <= MAX_RANK).unwrap_or(false);
                    if !fits {
                        break;
                    }
                    reports.push(verify_twisted_orbit(ts, n).map_err(|e| CliError::Failed(e.to_string()))?);
                }
            }
        }
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}{}", r.series, r.rank))
        .collect();
    let suite = OrbitSuite {
        pass: failed.is_empty(),
        checked: reports.iter().map(|r| r.equations.len()).sum(),
        failed,
        reports,
    };
    Ok(Outcome {
        text: json(&suite),
        pass: suite.pass,
        capped: false,
    })
}

#[derive(Serialize)]
struct SlgenReport {
    l: usize,
    q: u64,
    field: String,
    complete: bool,
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order_matches: Option<bool>,
    degree: usize,
    connection: Vec<String>,
    generators: BTreeMap<String, Vec<Vec<u32>>>,
}

pub fn slgen(c: &Common, l: usize, q: u64, check_order: bool) -> Result<Outcome, CliError> {
    let f = field(q)?;
    let gens = GenSet::new(l, &f)?;
    let e = bfs_enumerate(&gens.connection, c.max_order)?;
    let expected = sl_order(l + 1, q);
    let matches = expected.map(|x| e.complete && x == e.order() as u128);
    let rep = SlgenReport {
        l,
        q,
        field: f.spec().to_string(),
        complete: e.complete,
        order: e.order(),
        expected_order: check_order.then(|| expected.map_or("overflow".into(), |x| x.to_string())),
        order_matches: if check_order { Some(matches == Some(true)) } else { None },
        degree: gens.degree(),
        connection: gens.connection_names.clone(),
        generators: gens.named.iter().map(|(n, m)| (n.clone(), m.rows())).collect(),
    };
    if !e.complete {
        eprintln!("enumeration stopped at {} elements (cap {})", e.order(), c.max_order);
    }
    Ok(Outcome {
        text: json(&rep),
        pass: rep.order_matches != Some(false),
        capped: !e.complete,
    })
}

fn boundary_report(c: &Common, l: usize, q: u64) -> Result<BoundaryReport, CliError> {
    field(q)?;
    let mut rep = boundary_with_cap(l, q, c.max_order)?;
    if !c.timing {
        rep.runtime_ms = None;
    }
    Ok(rep)
}

pub fn boundary(c: &Common, l: usize, q: u64, sweep_oracle: bool) -> Result<Outcome, CliError> {
    let rep = boundary_report(c, l, q)?;
    if sweep_oracle && !rep.sweep_agrees {
        eprintln!(
            "sweep oracle disagrees: restricted {} vs sweep {}",
            rep.boundary, rep.sweep_boundary
        );
    }
    Ok(Outcome {
        text: json(&rep),
        pass: rep.pass(),
        capped: false,
    })
}

fn solve(c: &Common, g: &CayleyGraph, mode: Mode, seed: u64) -> Result<SpectralReport, CliError> {
    let rg = g.regular_graph()?;
    let start = Instant::now();
    let mut rep = match mode {
        Mode::Dense => lambda2_dense(&rg)?,
        Mode::Iter => lambda2_iterative(
            &rg,
            IterOptions {
                seed,
                ..Default::default()
            },
        )?,
    };
    if c.timing {
        eprintln!("{} {:?} solve: {:?}", g.label(), mode, start.elapsed());
    }
    rep.graph = g.label();
    Ok(rep)
}

pub fn spectrum(c: &Common, l: usize, q: u64, mode: Mode, seed: u64, cheeger: bool) -> Result<Outcome, CliError> {
    let f = field(q)?;
    let g = CayleyGraph::build(l, &f, c.max_order)?;
    let mut rep = solve(c, &g, mode, seed)?;
    let mut pass = rep.converged;
    if !rep.converged {
        eprintln!("iteration did not converge: residual {:e}", rep.residual);
    }
    if cheeger {
        let b = boundary_report(c, l, q)?;
        pass &= attach_boundary(&mut rep, &b)?;
    }
    Ok(Outcome {
        text: json(&rep),
        pass,
        capped: false,
    })
}

pub fn export(c: &Common, l: usize, q: u64, format: ExportFormat) -> Result<Outcome, CliError> {
    let f = field(q)?;
    let g = CayleyGraph::build(l, &f, c.max_order)?;
    let mut buf = Vec::new();
    match format {
        ExportFormat::Edgelist => g.write_edge_list(&mut buf).map_err(|e| CliError::Failed(e.to_string()))?,
    }
    Ok(Outcome {
        text: String::from_utf8(buf).expect("edge list is ascii"),
        pass: true,
        capped: false,
    })
}

#[derive(Serialize)]
struct ReportRow {
    l: usize,
    q: u64,
    n: String,
    d: usize,
    lambda2: Option<f64>,
    gap: Option<f64>,
    ratio: ExactRatio,
    pass: bool,
}

pub fn report(c: &Common, ls: &[usize], qs: &[u64], csv: bool, spectral_max_order: usize) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for &q in qs {
        let f = field(q)?;
        for &l in ls {
            let b = boundary_report(c, l, q)?;
            let n = sl_order(l + 1, q);
            let small = n.is_some_and(|n| n <= spectral_max_order as u128);
            let spec = if small {
                let g = CayleyGraph::build(l, &f, c.max_order)?;
                let mode = if g.order() <= DENSE_MAX { Mode::Dense } else { Mode::Iter };
                Some(solve(c, &g, mode, IterOptions::default().seed)?)
            } else {
                None
            };
            rows.push(ReportRow {
                l,
                q,
                n: n.map_or("overflow".into(), |n| n.to_string()),
                d: b.degree,
                lambda2: spec.as_ref().map(|s| s.lambda2),
                gap: spec.as_ref().map(|s| s.gap),
                ratio: b.ratio,
                pass: b.pass(),
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    let text = if csv {
        let mut s = String::from("l,q,n,d,lambda2,gap,ratio_num,ratio_den\n");
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for r in &rows {
            s += &format!(
                "{},{},{},{},{},{},{},{}\n",
                r.l,
                r.q,
                r.n,
                r.d,
                opt(r.lambda2),
                opt(r.gap),
                r.ratio.num,
                r.ratio.den
            );
        }
        s
    } else {
        json(&rows)
    };
    Ok(Outcome {
        text,
        pass,
        capped: false,
    })
}
