//! Plot-ready CSV rendering from a run manifest.
//!
//! Every table that the manifest's reports carry is written next to the
//! manifest; absent tables produce header-only files so downstream tooling
//! sees a stable set of columns.

use std::fmt::Write as _;
use std::path::Path;

use crate::manifest::RunManifest;
use crate::CliResult;

fn num(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) => format!("{n}"),
        serde_json::Value::Bool(b) => format!("{b}"),
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String]) -> CliResult<String> {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    std::fs::write(dir.join(name), out)?;
    Ok(name.to_string())
}

/// Render every table present in the manifest; returns the file names.
pub fn render(manifest: &RunManifest, dir: &Path) -> CliResult<Vec<String>> {
    let mut files = Vec::new();
    let reports = &manifest.reports;

    // Picard iteration ratios (windowed pipelines)
    {
        let mut rows = Vec::new();
        if let Some(windows) = reports["windows"].as_array() {
            for w in windows {
                let idx = num(&w["window"]);
                if let Some(incs) = w["increments"].as_array() {
                    let ratios = w["ratios"].as_array();
                    for (k, inc) in incs.iter().enumerate() {
                        let ratio = ratios
                            .and_then(|r| if k >= 1 { r.get(k - 1) } else { None })
                            .map(num)
                            .unwrap_or_default();
                        rows.push(format!("{idx},{k},{},{ratio}", num(inc)));
                    }
                }
            }
        }
        files.push(write_csv(dir, "iteration_ratios.csv", "window,iteration,increment,ratio", &rows)?);
    }

    // damping vs growth verdicts
    {
        let mut rows = Vec::new();
        if let Some(windows) = reports["windows"].as_array() {
            for w in windows {
                if w.get("verdict").is_some() {
                    rows.push(format!(
                        "{},{},{},{},{},{},{}",
                        num(&w["window"]),
                        num(&w["data_norm"]),
                        num(&w["damping"]),
                        num(&w["growth"]),
                        num(&w["verdict"]),
                        num(&w["measured_l2_max"]),
                        num(&w["bound_total_min"]),
                    ));
                }
            }
        }
        files.push(write_csv(
            dir,
            "damping_growth.csv",
            "window,data_norm,damping,growth,verdict,measured_l2_max,bound_total_min",
            &rows,
        )?);
    }

    // auto-controlled envelope rows
    {
        let mut rows = Vec::new();
        if let Some(runs) = reports["runs"].as_array() {
            for run in runs {
                if let Some(windows) = run["windows"].as_array() {
                    for w in windows {
                        rows.push(format!(
                            "{},{},{},{}",
                            num(&run["nu"]),
                            num(&w["window"]),
                            num(&w["u_norm"]),
                            num(&w["envelope"]),
                        ));
                    }
                }
            }
        }
        files.push(write_csv(dir, "autocontrol.csv", "nu,window,u_norm,envelope", &rows)?);
    }

    // viscosity-limit sweep rows
    {
        let mut rows = Vec::new();
        if let Some(runs) = reports["runs"].as_array() {
            for run in runs {
                if run.get("bound_constant").is_some() {
                    rows.push(format!(
                        "{},{},{}",
                        num(&run["nu"]),
                        num(&run["bound_constant"]),
                        num(&run["sup_omega_final"]),
                    ));
                }
            }
        }
        files.push(write_csv(dir, "euler_limit.csv", "nu,bound_constant,sup_omega", &rows)?);
    }

    // blow-up indicator series: one file per run, exact column contract
    {
        let mut first_rows = Vec::new();
        let mut extra = Vec::new();
        if let Some(runs) = reports["runs"].as_array() {
            for (i, run) in runs.iter().enumerate() {
                if let Some(ind) = run["indicator_rows"].as_array() {
                    let rows: Vec<String> = ind
                        .iter()
                        .map(|r| {
                            format!(
                                "{},{},{}",
                                num(&r["t"]),
                                num(&r["sup_omega"]),
                                num(&r["bkm_integral"]),
                            )
                        })
                        .collect();
                    if first_rows.is_empty() {
                        first_rows = rows;
                    } else {
                        extra.push((format!("blowup_indicator_{i}.csv"), rows));
                    }
                }
            }
        }
        files.push(write_csv(dir, "blowup_indicator.csv", "t,sup_omega,bkm_integral", &first_rows)?);
        for (name, rows) in extra {
            files.push(write_csv(dir, &name, "t,sup_omega,bkm_integral", &rows)?);
        }
    }

    // decay profiles
    {
        let mut rows = Vec::new();
        if let Some(consts) = reports["decay_constants"].as_array() {
            let order = num(&reports["decay_order"]);
            for c in consts {
                let gamma: Vec<String> = c["gamma"]
                    .as_array()
                    .map(|g| g.iter().map(num).collect())
                    .unwrap_or_default();
                rows.push(format!("{order},{},{}", gamma.join(";"), num(&c["constant"])));
            }
        }
        files.push(write_csv(dir, "decay_profiles.csv", "order,gamma,constant", &rows)?);
    }

    // singular refinement probes
    {
        let mut rows = Vec::new();
        if let Some(probes) = reports["probes"].as_array() {
            for p in probes {
                rows.push(format!(
                    "{},{},{},{},{}",
                    num(&p["n"]),
                    num(&p["holder09"]),
                    num(&p["lipschitz_grad"]),
                    num(&p["el_lipschitz"]),
                    num(&p["el_holder09"]),
                ));
            }
        }
        files.push(write_csv(
            dir,
            "singular_probes.csv",
            "n,holder09,lipschitz_grad,el_lipschitz,el_holder09",
            &rows,
        )?);
    }

    // damping audit summary
    {
        let mut rows = Vec::new();
        if let Some(sets) = reports["sets"].as_array() {
            for s in sets {
                rows.push(format!(
                    "{},{},{},{},{},{},{},{}",
                    num(&s["set"]),
                    num(&s["nu"]),
                    num(&s["rho"]),
                    num(&s["r_scale"]),
                    num(&s["dt"]),
                    num(&s["fields"]),
                    num(&s["violations"]),
                    num(&s["min_margin"]),
                ));
            }
        }
        files.push(write_csv(
            dir,
            "damping_audit.csv",
            "set,nu,rho,r_scale,dt,fields,violations,min_margin",
            &rows,
        )?);
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "pipeline,{}", manifest.pipeline);
    let _ = writeln!(summary, "config_hash,{}", manifest.config_hash);
    let _ = writeln!(summary, "artifacts,{}", manifest.telemetry.artifact_count);
    std::fs::write(dir.join("summary.csv"), summary)?;
    files.push("summary.csv".to_string());
    Ok(files)
}
