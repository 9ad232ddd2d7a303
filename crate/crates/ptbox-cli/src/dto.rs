//! Serialized forms of library results.

use num_complex::Complex64;
use ptbox::em_scattering::ResonanceFit;
use ptbox::kernel_maps::NonlocalityWitness;
use ptbox::spectrum::Mode;
use ptbox::variational::ExtremizeReport;
use serde::Serialize;

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
pub struct ModeDto {
    pub n: usize,
    pub k: [f64; 2],
    pub energy: [f64; 2],
    pub norm: [f64; 2],
    pub adjoint_norm: [f64; 2],
    pub pt_eigenvalue: Option<i8>,
}

impl From<&Mode> for ModeDto {
    fn from(m: &Mode) -> Self {
        Self {
            n: m.n,
            k: pair(m.k),
            energy: pair(m.energy),
            norm: pair(m.norm),
            adjoint_norm: pair(m.adjoint_norm),
            pt_eigenvalue: m.pt_eigenvalue,
        }
    }
}

#[derive(Serialize)]
pub struct SpectrumDto {
    #[serde(rename = "L")]
    pub length: f64,
    pub ell1: f64,
    pub ell2: f64,
    pub broken: bool,
    pub modes: Vec<ModeDto>,
    pub plane_wave_mode: Option<ModeDto>,
}

#[derive(Serialize)]
pub struct InnerDto {
    pub gram: usize,
    pub c_terms: usize,
    pub biorthogonal_deviation: f64,
    pub cpt_deviation: f64,
}

#[derive(Serialize)]
pub struct ClassDto {
    pub class: &'static str,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub pt_norms: Vec<f64>,
    pub failed_starts: usize,
}

impl ClassDto {
    pub fn new(class: &'static str, r: &ExtremizeReport) -> Self {
        Self {
            class,
            eigenvalues: r.eigenvalues(),
            residuals: r.results.iter().map(|x| x.residual).collect(),
            pt_norms: r.results.iter().map(|x| x.pt_norm).collect(),
            failed_starts: r.failed_starts.len(),
        }
    }
}

#[derive(Serialize)]
pub struct VariationalDto {
    pub n: usize,
    pub seed: u64,
    pub coupling: f64,
    pub classes: Vec<ClassDto>,
    pub dense_spectrum: Vec<[f64; 2]>,
    pub unmatched: Vec<[f64; 2]>,
}

impl VariationalDto {
    pub fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
        v.iter().copied().map(pair).collect()
    }
}

#[derive(Serialize)]
pub struct FitDto {
    pub k_c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "Q2")]
    pub q2: f64,
    pub rho: f64,
    pub parity: Option<&'static str>,
    pub residual: f64,
}

impl From<&ResonanceFit> for FitDto {
    fn from(f: &ResonanceFit) -> Self {
        Self {
            k_c: f.k_c,
            q: f.q,
            z: f.z,
            delta: f.fano_delta,
            q2: f.q2,
            rho: f.rho,
            parity: f.parity.map(|p| p.as_str()),
            residual: f.residual,
        }
    }
}

#[derive(Serialize)]
pub struct WitnessDto {
    pub x: f64,
    pub x_prime: f64,
    pub k1_abs: f64,
    pub k2_bound: f64,
    pub margin: f64,
}

impl From<&NonlocalityWitness> for WitnessDto {
    fn from(w: &NonlocalityWitness) -> Self {
        Self { x: w.x, x_prime: w.x_prime, k1_abs: w.k1_abs, k2_bound: w.k2_bound, margin: w.margin }
    }
}

#[derive(Serialize)]
pub struct KernelDto {
    #[serde(rename = "L")]
    pub length: f64,
    pub ell2: f64,
    pub terms: usize,
    pub points: usize,
    pub method: &'static str,
    pub k2_bound: f64,
    pub witness: Option<WitnessDto>,
}
