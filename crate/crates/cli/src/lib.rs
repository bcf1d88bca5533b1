//! Command line entry points and the HTTP service.

pub mod service;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use coaplan_core::matrix::{build_sync_matrix, export_matrix, MatrixFormat};
use coaplan_core::scenario::{load_scenario, scenario_warnings, validate_scenario};
use coaplan_core::{expand_coa, parse_kb, PlannerConfig};

/// Exit status of `plan`: 0 success, 1 bad input, 2 planner failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PLANNER: i32 = 2;

#[derive(Clone, Debug)]
pub struct PlanArgs {
    pub scenario: PathBuf,
    pub kb: PathBuf,
    pub out: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub cfg: PlannerConfig,
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

/// Runs `plan`. The plan goes to `--out` or, without it, to `out`.
pub fn run_plan(args: &PlanArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (Some(doc), Some(kb_text)) = (read(&args.scenario, err), read(&args.kb, err)) else {
        return EXIT_INPUT;
    };
    let scenario = match load_scenario(&doc) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", args.scenario.display());
            return EXIT_INPUT;
        }
    };
    let kb = match parse_kb(&kb_text) {
        Ok(kb) => kb,
        Err(e) => {
            let _ = writeln!(err, "error: {}:{}: {e}", args.kb.display(), e.span());
            return EXIT_INPUT;
        }
    };
    let violations = validate_scenario(&scenario);
    if !violations.is_empty() {
        for v in &violations {
            let _ = writeln!(err, "{v}");
        }
        return EXIT_INPUT;
    }
    for w in scenario_warnings(&scenario) {
        let _ = writeln!(err, "warning: {w}");
    }
    let plan = match expand_coa(&scenario, &kb, &args.cfg) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            return EXIT_PLANNER;
        }
    };
    let mut json = plan.to_json();
    json.push('\n');
    let written = match &args.out {
        Some(path) => fs::write(path, &json).map_err(|e| (path.clone(), e)),
        None => out
            .write_all(json.as_bytes())
            .map_err(|e| (PathBuf::from("<stdout>"), e)),
    };
    if let Some(path) = &args.matrix {
        let csv = export_matrix(
            &build_sync_matrix(&plan, args.cfg.sync_period_min),
            MatrixFormat::Csv,
        );
        if let Err(e) = fs::write(path, csv) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    if let Err((path, e)) = written {
        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}
