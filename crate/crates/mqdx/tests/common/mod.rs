#![allow(dead_code)]

use std::path::{Path, PathBuf};

/// Relaxation deck in the tutorial layout; `extra` lines override earlier keys.
pub fn relax_deck(job: &str, n: usize, m: usize, lambda: f64, grid: (usize, f64, f64), t_final: f64, extra: &str) -> String {
    format!(
        "! relaxation\n\
         JOB_TYPE = '{job}'\n\
         Npar = {n}\n\
         Morb = {m}\n\
         xlambda_0 = {lambda:?}d0\n\
         mass = 1.0d0\n\
         Job_Prefactor = (-1.0d0,0.0d0)\n\
         GUESS = 'HAND'\n\
         DIM_MCTDH = 1\n\
         NDVR_X = {}\n\
         NDVR_Y = 1\n\
         NDVR_Z = 1\n\
         x_initial = {:?}d0\n\
         x_final = {:?}d0\n\
         Time_Begin = 0.0d0\n\
         Time_Final = {t_final:?}d0\n\
         Output_TimeStep = 1.0d0\n\
         Integration_Stepsize = 0.1d0\n\
         Write_ASCII = .T.\n\
         Coefficients_Integrator = 'DAV'\n\
         Orbital_Integrator = 'RK'\n\
         whichpot = \"HO1D\"\n\
         parameter1 = 1.d0\n\
         Interaction_Type = 0\n\
         which_interaction = 'delta'\n\
         {extra}",
        grid.0, grid.1, grid.2
    )
}

/// Propagation deck continuing from the snapshot at `start`.
pub fn propagate_deck(relax_text: &str, start: f64, t_final: f64, extra: &str) -> String {
    let mut text: String = relax_text
        .lines()
        .filter(|l| {
            !["Job_Prefactor", "GUESS", "Time_Final", "Integration_Stepsize", "Coefficients_Integrator"]
                .iter()
                .any(|k| l.starts_with(k))
        })
        .map(|l| format!("{l}\n"))
        .collect();
    text.push_str(&format!(
        "Job_Prefactor = (0.0d0,-1.0d0)\nGUESS = 'BINR'\nBinary_Start_Time = {start:?}d0\n\
         Time_Final = {t_final:?}d0\nIntegration_Stepsize = 0.01d0\nCoefficients_Integrator = 'MCS'\n{extra}"
    ));
    text
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}
