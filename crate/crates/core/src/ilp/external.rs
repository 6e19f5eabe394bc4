use std::ffi::{CStr, CString};
use std::fmt::Write as _;
use std::os::raw::c_char;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use highs_sys::*;

use super::backend::{Capabilities, IlpSolution, SolveParams, SolveStatus, SolverBackend};
use super::lp_format::{export_lp, import_solution};
use super::model::IlpModel;
use crate::error::{Error, Result};

/// Environment variable naming the solver executable.
pub const BACKEND_PATH_ENV: &str = "GI_BACKEND_PATH";

/// Extra wall time granted to the process beyond the scaled time limit.
const KILL_SLACK: Duration = Duration::from_secs(5);

/// Runs a solver executable on an exported LP file and reads back its
/// solution file.
///
/// Arguments are built from a template in which `{lp}`, `{sol}`,
/// `{time_limit}` (seconds, `inf` when unlimited) and `{threads}` are
/// substituted. The process is killed once it exceeds the time limit by
/// ten percent plus a few seconds.
#[derive(Clone, Debug)]
pub struct ExternalBackend {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalBackend {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        ExternalBackend {
            program: program.into(),
            args,
        }
    }

    pub fn default_args() -> Vec<String> {
        ["{lp}", "{sol}", "{time_limit}", "{threads}"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    /// Backend configured by `GI_BACKEND_PATH`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(BACKEND_PATH_ENV)
            .filter(|p| !p.is_empty())
            .map(|p| Self::new(p, Self::default_args()))
    }

    fn expand(&self, lp: &Path, sol: &Path, params: &SolveParams) -> Vec<String> {
        let limit = params
            .time_limit
            .map_or_else(|| "inf".to_string(), |t| t.as_secs_f64().to_string());
        let threads = params.threads.unwrap_or(1).to_string();
        self.args
            .iter()
            .map(|a| {
                a.replace("{lp}", &lp.to_string_lossy())
                    .replace("{sol}", &sol.to_string_lossy())
                    .replace("{time_limit}", &limit)
                    .replace("{threads}", &threads)
            })
            .collect()
    }
}

impl SolverBackend for ExternalBackend {
    fn name(&self) -> &str {
        "external"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            milp: true,
            lp_relaxation: true,
            time_limit: true,
            threads: true,
        }
    }

    fn solve(&self, model: &IlpModel, params: &SolveParams) -> Result<IlpSolution> {
        if params.time_limit.is_some_and(|t| t.is_zero()) {
            return Ok(IlpSolution::without_assignment(SolveStatus::Timeout));
        }
        let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        let lp = dir.path().join("model.lp");
        let sol = dir.path().join("model.sol");
        std::fs::write(&lp, export_lp(model, params.relax)).map_err(|e| Error::io(&lp, e))?;

        let mut child = Command::new(&self.program)
            .args(self.expand(&lp, &sol, params))
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| {
                Error::BackendUnavailable(format!("cannot run {}: {e}", self.program.display()))
            })?;
        let deadline = params
            .time_limit
            .map(|t| Instant::now() + t.mul_f64(1.1) + KILL_SLACK);
        let status = loop {
            if let Some(status) = child
                .try_wait()
                .map_err(|e| Error::BackendUnavailable(e.to_string()))?
            {
                break status;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(IlpSolution::without_assignment(SolveStatus::Timeout));
            }
            std::thread::sleep(Duration::from_millis(5));
        };
        if !status.success() {
            let mut err = String::new();
            if let Some(mut pipe) = child.stderr.take() {
                use std::io::Read;
                let _ = pipe.read_to_string(&mut err);
            }
            return Err(Error::ModelRejected(format!(
                "{} exited with {status}: {}",
                self.program.display(),
                err.trim()
            )));
        }
        let text = std::fs::read_to_string(&sol).map_err(|e| Error::io(&sol, e))?;
        let mut solution = import_solution(model, &text)?;
        if solution.has_assignment() {
            solution.objective = model.objective(&solution.values);
        }
        Ok(solution)
    }
}

/// Owned HiGHS instance for file-driven solves.
struct Highs(*mut std::ffi::c_void);

impl Drop for Highs {
    fn drop(&mut self) {
        // SAFETY: pointer obtained from Highs_create and destroyed once.
        unsafe { Highs_destroy(self.0) }
    }
}

fn cstr(s: &str) -> CString {
    CString::new(s).expect("no interior NUL")
}

/// Reads an LP file, solves it with HiGHS and writes a solution file in the
/// format understood by [`ExternalBackend`]. This is what `gi lp-solve`
/// runs, so the binary can serve as its own external solver.
pub fn solve_lp_file(
    lp: &Path,
    sol: &Path,
    time_limit: Option<f64>,
    threads: Option<usize>,
) -> Result<SolveStatus> {
    let highs = Highs(unsafe { Highs_create() });
    // SAFETY: all calls below pass a live instance and NUL-terminated strings.
    unsafe {
        Highs_setBoolOptionValue(highs.0, cstr("output_flag").as_ptr(), 0);
        Highs_setDoubleOptionValue(highs.0, cstr("mip_rel_gap").as_ptr(), 1e-6);
        if let Some(t) = time_limit.filter(|t| t.is_finite()) {
            Highs_setDoubleOptionValue(highs.0, cstr("time_limit").as_ptr(), t);
        }
        if let Some(n) = threads {
            Highs_setIntOptionValue(highs.0, cstr("threads").as_ptr(), n as HighsInt);
        }
        let path = cstr(&lp.to_string_lossy());
        if Highs_readModel(highs.0, path.as_ptr()) == kHighsStatusError {
            return Err(Error::ModelRejected(format!(
                "cannot read {}",
                lp.display()
            )));
        }
        if Highs_run(highs.0) == kHighsStatusError {
            return Err(Error::ModelRejected("HiGHS run failed".into()));
        }
        let mut primal: HighsInt = 0;
        Highs_getIntInfoValue(
            highs.0,
            cstr("primal_solution_status").as_ptr(),
            &mut primal,
        );
        let has_primal = primal == kHighsSolutionStatusFeasible;
        let status = match Highs_getModelStatus(highs.0) {
            s if s == kHighsModelStatusOptimal || s == kHighsModelStatusModelEmpty => {
                SolveStatus::Optimal
            }
            s if s == kHighsModelStatusInfeasible
                || s == kHighsModelStatusUnboundedOrInfeasible =>
            {
                SolveStatus::Infeasible
            }
            s if s == kHighsModelStatusTimeLimit
                || s == kHighsModelStatusIterationLimit
                || s == kHighsModelStatusInterrupt =>
            {
                if has_primal {
                    SolveStatus::Feasible
                } else {
                    SolveStatus::Timeout
                }
            }
            s => return Err(Error::ModelRejected(format!("HiGHS model status {s}"))),
        };
        let mut out = String::new();
        let word = match status {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Timeout => "timeout",
        };
        let has_values = matches!(status, SolveStatus::Optimal | SolveStatus::Feasible);
        let objective = if has_values {
            Highs_getObjectiveValue(highs.0)
        } else {
            0.0
        };
        let _ = writeln!(out, "status {word}");
        let _ = writeln!(out, "objective {objective}");
        if has_values {
            let ncol = Highs_getNumCol(highs.0) as usize;
            let nrow = Highs_getNumRow(highs.0) as usize;
            let mut col = vec![0.0; ncol];
            let mut col_dual = vec![0.0; ncol];
            let mut row = vec![0.0; nrow];
            let mut row_dual = vec![0.0; nrow];
            Highs_getSolution(
                highs.0,
                col.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            );
            let mut name = vec![0 as c_char; kHighsMaximumStringLength as usize + 1];
            for (j, value) in col.iter().enumerate() {
                if *value == 0.0 {
                    continue;
                }
                Highs_getColName(highs.0, j as HighsInt, name.as_mut_ptr());
                let n = CStr::from_ptr(name.as_ptr()).to_string_lossy();
                let _ = writeln!(out, "{n} {value}");
            }
        }
        std::fs::write(sol, out).map_err(|e| Error::io(sol, e))?;
        Ok(status)
    }
}
