use std::time::Duration;

use crate::cube::HyperCube;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `1/2 ||y - Phi x||^2 + lambda * TV(x)`.
    pub objective: f64,
    /// `||y - Phi x||_2`.
    pub data_fidelity: f64,
    pub psnr: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReconReport {
    pub algorithm: &'static str,
    pub records: Vec<IterationRecord>,
    pub cube: HyperCube,
    pub wall_time: Duration,
}

impl ReconReport {
    pub fn final_psnr(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.psnr)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// Per-iteration rows: `iteration,objective,data_fidelity,psnr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective,data_fidelity,psnr\n");
        for r in &self.records {
            let psnr = r.psnr.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.iteration, r.objective, r.data_fidelity, psnr));
        }
        out
    }
}
