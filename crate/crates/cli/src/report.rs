//! CSV, SVG and verdict files for a bundle.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bundle::*;
use crate::error::{CliError, Result};
use crate::svg::{capsule_tree, Plot, Series};

/// File name and contents.
pub type Rendered = Vec<(String, Vec<u8>)>;

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Report(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Report(e.to_string()))
}

fn csv_raw(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| CliError::Report(e.to_string()))?;
    for r in rows {
        w.write_record(r)
            .map_err(|e| CliError::Report(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Report(e.to_string()))
}

fn verdict_text(b: &ReportBundle) -> Vec<u8> {
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", b.name);
    let _ = writeln!(
        s,
        "artifact: {} (catalog {})",
        b.provenance.artifact_version, b.provenance.catalog_version
    );
    let _ = writeln!(s, "cache key: {}", b.provenance.cache_key);
    let _ = writeln!(s, "wall time: {:.3} s", b.provenance.wall_time_s);
    for v in &b.verdicts {
        let _ = writeln!(
            s,
            "{} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.rule,
            v.detail
        );
    }
    let _ = writeln!(s, "overall: {}", if b.all_pass() { "PASS" } else { "FAIL" });
    s.into_bytes()
}

fn mass_plots(name: &str, rows: &[MassRowRecord], limit: f64, out: &mut Rendered) {
    let conv = Plot {
        title: format!("{name}: convergence of the boundary integral"),
        x_label: "rho".into(),
        y_label: "|m(rho) - m_inf|".into(),
        x_log: true,
        y_log: true,
        series: vec![
            Series {
                label: "integrand".into(),
                points: rows
                    .iter()
                    .map(|r| (r.rho, (r.integrand - limit).abs()))
                    .collect(),
                dashed: false,
            },
            Series {
                label: "running extrapolation".into(),
                points: rows
                    .iter()
                    .map(|r| (r.rho, (r.running_extrapolation - limit).abs()))
                    .collect(),
                dashed: true,
            },
        ],
    };
    out.push((
        format!("{name}_convergence.svg"),
        conv.render().into_bytes(),
    ));
    let vs = Plot {
        title: format!("{name}: mass integral against rho"),
        x_label: "rho".into(),
        y_label: "m(rho)".into(),
        x_log: true,
        y_log: false,
        series: vec![
            Series {
                label: "m(rho)".into(),
                points: rows.iter().map(|r| (r.rho, r.integrand)).collect(),
                dashed: false,
            },
            Series {
                label: format!("m_inf = {limit:.8}"),
                points: rows.iter().map(|r| (r.rho, limit)).collect(),
                dashed: true,
            },
        ],
    };
    out.push((format!("{name}_mass_vs_rho.svg"), vs.render().into_bytes()));
}

fn nonempty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        Err(CliError::Report(format!("no {what} to report")))
    } else {
        Ok(())
    }
}

fn blowup_files(name: &str, b: &BlowupRecord, out: &mut Rendered) -> Result<()> {
    nonempty(&b.mass_rows, "mass radii")?;
    out.push((format!("{name}_mass.csv"), csv_bytes(&b.mass_rows)?));
    let area_rows: Vec<Vec<String>> = b
        .area_radii
        .iter()
        .zip(&b.area_values)
        .map(|(r, v)| vec![r.to_string(), v.to_string()])
        .collect();
    out.push((
        format!("{name}_area.csv"),
        csv_raw(&["rho", "cycle_integral"], &area_rows)?,
    ));
    mass_plots(name, &b.mass_rows, b.mass, out);
    Ok(())
}

fn quantities(rows: &[(&str, f64)]) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(k, v)| vec![k.to_string(), v.to_string()])
        .collect();
    csv_raw(&["quantity", "value"], &rows)
}

/// Every output file of the bundle, in memory.
pub fn render(b: &ReportBundle) -> Result<Rendered> {
    let name = &b.name;
    let mut out: Rendered = vec![];
    match &b.records {
        Records::Mass(m) => {
            nonempty(&m.rows, "mass radii")?;
            out.push((format!("{name}_mass.csv"), csv_bytes(&m.rows)?));
            mass_plots(name, &m.rows, m.extrapolated_mass, &mut out);
        }
        Records::Hj(h) => {
            nonempty(&h.chain, "chain entries")?;
            let mut t = String::new();
            let chain: Vec<String> = h.chain.iter().map(|e| e.to_string()).collect();
            let dual: Vec<String> = h.dual_chain.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(t, "type ({},{})", h.q, h.p);
            let _ = writeln!(t, "chain [{}]", chain.join(","));
            let _ = writeln!(t, "intermediates {}", h.intermediates.join(" "));
            let _ = writeln!(t, "dual ({},{}) [{}]", h.q, h.dual_p, dual.join(","));
            let _ = writeln!(t, "b_plus {}", h.b_plus);
            let _ = writeln!(t, "determinant {}", h.determinant);
            out.push((format!("{name}_hj.txt"), t.into_bytes()));
            let mut header = vec![""];
            header.extend(h.labels.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = h
                .plumbing
                .iter()
                .zip(&h.labels)
                .map(|(row, l)| {
                    std::iter::once(l.clone())
                        .chain(row.iter().map(|v| v.to_string()))
                        .collect()
                })
                .collect();
            out.push((format!("{name}_plumbing.csv"), csv_raw(&header, &rows)?));
        }
        Records::Capsule(c) => {
            nonempty(&c.vertices, "vertices")?;
            let mut t = c.adjacency.clone();
            t.push('\n');
            for ((q, p), chain) in c.local_types.iter().zip(&c.chains) {
                let e: Vec<String> = chain.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(t, "({q},{p}) [{}]", e.join(","));
            }
            let _ = writeln!(t, "degree {}", c.degree);
            out.push((format!("{name}_capsule.txt"), t.into_bytes()));
            let labels: Vec<String> = c
                .vertices
                .iter()
                .map(|v| match &v.weight {
                    Some(w) => w.clone(),
                    None => "S".into(),
                })
                .collect();
            let svg = capsule_tree(
                &format!("{name}: {} capsule, l = {}", c.group, c.ell),
                &labels,
                &c.edges,
            );
            out.push((format!("{name}_capsule.svg"), svg.into_bytes()));
        }
        Records::Moser(m) => {
            nonempty(&m.seeds, "seeds")?;
            out.push((format!("{name}_moser.csv"), csv_bytes(&m.seeds)?));
            let fit_line =
                |slope: Option<f64>, ys: &dyn Fn(&SeedRecord) -> f64| -> Vec<(f64, f64)> {
                    match (slope, m.seeds.first()) {
                        (Some(s), Some(first)) => m
                            .seeds
                            .iter()
                            .map(|r| (r.rho, ys(first) * (r.rho / first.rho).powf(s)))
                            .collect(),
                        _ => vec![],
                    }
                };
            let plot = Plot {
                title: format!("{name}: fall-off of the Moser flow"),
                x_label: "rho".into(),
                y_label: "deviation".into(),
                x_log: true,
                y_log: true,
                series: vec![
                    Series {
                        label: "|Phi(x) - x|".into(),
                        points: m.seeds.iter().map(|r| (r.rho, r.displacement)).collect(),
                        dashed: false,
                    },
                    Series {
                        label: "|DPhi - I|".into(),
                        points: m.seeds.iter().map(|r| (r.rho, r.jacobian_defect)).collect(),
                        dashed: false,
                    },
                    Series {
                        label: format!(
                            "fit slope {}",
                            m.displacement_slope
                                .map_or("-".into(), |s| format!("{s:.3}"))
                        ),
                        points: fit_line(m.displacement_slope, &|r| r.displacement),
                        dashed: true,
                    },
                    Series {
                        label: format!(
                            "fit slope {}",
                            m.jacobian_slope.map_or("-".into(), |s| format!("{s:.3}"))
                        ),
                        points: fit_line(m.jacobian_slope, &|r| r.jacobian_defect),
                        dashed: true,
                    },
                ],
            };
            out.push((format!("{name}_falloff.svg"), plot.render().into_bytes()));
        }
        Records::Crosscheck(c) => {
            blowup_files(name, &c.blowup, &mut out)?;
            out.push((
                format!("{name}_crosscheck.csv"),
                quantities(&[
                    ("boundary_mass", c.blowup.mass),
                    ("exceptional_area", c.blowup.exceptional_area),
                    ("scalar_integral", c.blowup.scalar_integral),
                    ("formula_mass", c.formula_mass),
                    ("rel_err", c.rel_err),
                ])?,
            ));
        }
        Records::Penrose(p) => {
            blowup_files(name, &p.blowup, &mut out)?;
            out.push((
                format!("{name}_penrose.csv"),
                quantities(&[
                    ("boundary_mass", p.blowup.mass),
                    ("scalar_bump", p.scalar_bump),
                    ("mass", p.mass),
                    ("exceptional_area", p.blowup.exceptional_area),
                    ("lower_bound", p.lower_bound),
                    ("gap", p.gap),
                ])?,
            ));
        }
    }
    out.push((format!("{name}_verdict.txt"), verdict_text(b)));
    Ok(out)
}

/// Renders everything first, then writes each file via a temporary file
/// and rename, so a failure leaves no partial output.
pub fn emit_report(b: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    let files = render(b)?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in &files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
        tmp.write_all(bytes)
            .map_err(|e| CliError::io(tmp.path(), e))?;
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, path) in staged {
        tmp.persist(&path)
            .map_err(|e| CliError::io(&path, e.error))?;
        written.push(path);
    }
    Ok(written)
}
