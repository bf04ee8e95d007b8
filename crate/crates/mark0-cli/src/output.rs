//! Plot-ready output files: run CSV, impulse-response CSV and the phase-grid
//! document. All writers are atomic (write to a temp file, then rename), so
//! a failed run never leaves a partial file behind.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use mark0::{Phase, RunRecord};

use crate::experiments::{AxisSpec, CellStats, PhaseGrid, ShockResponse};

/// Schema tags embedded in every output header.
pub const TIMESERIES_SCHEMA: &str = "mark0-timeseries v1";
pub const GRID_SCHEMA: &str = "mark0-grid v1";
pub const SHOCK_SCHEMA: &str = "mark0-shock v1";

/// Formats a float with 12 significant digits; parsing the result
/// reproduces the value at that precision.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.11e}")
    }
}

/// Renders the run record as CSV: the exact header row and one row per step.
pub fn render_timeseries(record: &RunRecord) -> String {
    let mut out = String::with_capacity(record.len() * 160 + 128);
    out.push_str("t,u,epsilon,pi,rho0,rho_l,rho_d,pbar,wbar,S,Eplus,Eminus,defaults,bankruptcies,Gamma,c\n");
    for i in 0..record.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            record.t[i],
            fmt_sig(record.u[i]),
            fmt_sig(record.epsilon[i]),
            fmt_sig(record.pi[i]),
            fmt_sig(record.rho0[i]),
            fmt_sig(record.rho_loan[i]),
            fmt_sig(record.rho_deposit[i]),
            fmt_sig(record.pbar[i]),
            fmt_sig(record.wbar[i]),
            fmt_sig(record.savings[i]),
            fmt_sig(record.firm_deposits[i]),
            fmt_sig(record.firm_loans[i]),
            fmt_sig(record.default_costs[i]),
            record.bankruptcies[i],
            fmt_sig(record.gamma[i]),
            fmt_sig(record.propensity[i]),
        );
    }
    out
}

/// Renders the ensemble-averaged impulse response.
pub fn render_shock(response: &ShockResponse) -> String {
    let mut out = String::new();
    out.push_str("offset,output,wages,prices\n");
    for i in 0..response.offset.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            response.offset[i],
            fmt_sig(response.output[i]),
            fmt_sig(response.wages[i]),
            fmt_sig(response.prices[i]),
        );
    }
    out
}

/// Renders the phase grid as a sectioned text document carrying the axes,
/// the full configuration it came from, and per-cell statistics with the
/// exact seeds needed to replay any cell.
pub fn render_grid(grid: &PhaseGrid, config_text: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{GRID_SCHEMA}");
    let _ = writeln!(out, "x_param {}", grid.x.name);
    let _ = writeln!(
        out,
        "x_values {}",
        grid.x.values.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(",")
    );
    let _ = writeln!(out, "y_param {}", grid.y.name);
    let _ = writeln!(
        out,
        "y_values {}",
        grid.y.values.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(",")
    );
    let _ = writeln!(out, "ensemble {}", grid.ensemble);
    let _ = writeln!(out, "base_seed {}", grid.base_seed);
    let _ = writeln!(out, "config_begin");
    for line in config_text.lines() {
        let _ = writeln!(out, "  {line}");
    }
    let _ = writeln!(out, "config_end");
    let _ = writeln!(
        out,
        "# cell xi yi x y mean_u std_u mean_amplitude mean_pi label failures seeds"
    );
    for cell in &grid.cells {
        let _ = writeln!(
            out,
            "cell {} {} {} {} {} {} {} {} {} {} {}",
            cell.xi,
            cell.yi,
            fmt_sig(cell.x_value),
            fmt_sig(cell.y_value),
            fmt_sig(cell.mean_u),
            fmt_sig(cell.std_u),
            fmt_sig(cell.mean_amplitude),
            fmt_sig(cell.mean_pi),
            cell.majority.label(),
            cell.failures,
            cell.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        );
    }
    out
}

/// Parses a grid document back (used to replay cells and by tests).
/// Returns the grid and the embedded config text.
pub fn parse_grid(text: &str) -> Result<(PhaseGrid, String), String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first == GRID_SCHEMA => {}
        other => return Err(format!("unexpected grid header: {other:?}")),
    }
    let mut x: Option<AxisSpec> = None;
    let mut y: Option<AxisSpec> = None;
    let mut x_name = String::new();
    let mut y_name = String::new();
    let mut ensemble = 0usize;
    let mut base_seed = 0u64;
    let mut config_text = String::new();
    let mut cells = Vec::new();
    let mut in_config = false;
    for line in lines {
        if in_config {
            if line.trim() == "config_end" {
                in_config = false;
            } else {
                config_text.push_str(line.strip_prefix("  ").unwrap_or(line));
                config_text.push('\n');
            }
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        match tag {
            "x_param" => x_name = rest.to_string(),
            "y_param" => y_name = rest.to_string(),
            "x_values" => {
                let values = parse_float_list(rest)?;
                x = Some(AxisSpec { name: x_name.clone(), values });
            }
            "y_values" => {
                let values = parse_float_list(rest)?;
                y = Some(AxisSpec { name: y_name.clone(), values });
            }
            "ensemble" => ensemble = rest.parse().map_err(|_| "bad ensemble".to_string())?,
            "base_seed" => base_seed = rest.parse().map_err(|_| "bad base_seed".to_string())?,
            "config_begin" => in_config = true,
            "cell" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 11 {
                    return Err(format!("cell line has {} fields, expected 11", fields.len()));
                }
                let parse_f = |s: &str| s.parse::<f64>().map_err(|_| format!("bad float '{s}'"));
                cells.push(CellStats {
                    xi: fields[0].parse().map_err(|_| "bad xi".to_string())?,
                    yi: fields[1].parse().map_err(|_| "bad yi".to_string())?,
                    x_value: parse_f(fields[2])?,
                    y_value: parse_f(fields[3])?,
                    mean_u: parse_f(fields[4])?,
                    std_u: parse_f(fields[5])?,
                    mean_amplitude: parse_f(fields[6])?,
                    mean_pi: parse_f(fields[7])?,
                    majority: Phase::from_label(fields[8]).ok_or("bad phase label")?,
                    failures: fields[9].parse().map_err(|_| "bad failures".to_string())?,
                    seeds: fields[10]
                        .split(',')
                        .map(|s| s.parse().map_err(|_| format!("bad seed '{s}'")))
                        .collect::<Result<Vec<u64>, String>>()?,
                });
            }
            other => return Err(format!("unknown grid tag '{other}'")),
        }
    }
    let x = x.ok_or("missing x axis")?;
    let y = y.ok_or("missing y axis")?;
    let expected = x.values.len() * y.values.len();
    if cells.len() != expected {
        return Err(format!("grid has {} cells, expected {expected}", cells.len()));
    }
    Ok((
        PhaseGrid {
            x,
            y,
            ensemble,
            base_seed,
            cells,
        },
        config_text,
    ))
}

fn parse_float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad float '{v}'")))
        .collect()
}

/// Writes content atomically: a temp file in the target directory is
/// renamed over the destination only after a complete write.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp = file_name.to_os_string();
    tmp.push(".tmp");
    let tmp_path = match dir {
        Some(d) => d.join(&tmp),
        None => Path::new(&tmp).to_path_buf(),
    };
    let result = fs::write(&tmp_path, content).and_then(|()| fs::rename(&tmp_path, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp_path);
    }
    result
}

/// Prefixes every line of `body` with `# ` for embedding provenance in CSV
/// comments.
pub fn comment_block(header: &str, body: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {header}");
    for line in body.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}
