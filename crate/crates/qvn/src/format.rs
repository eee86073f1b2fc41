//! JSON file format shared by programs, channels, superchannels and
//! covariant program families.
//!
//! Every document carries a `schema` field. Programs use
//!
//! ```text
//! {
//!   "schema": "qvn.program/1",
//!   "kind": "choi" | "kraus" | "superchannel",
//!   "dims_head": [..], "dims_tail": [..],
//!   "matrix": [[re, im], ...],
//!   "metadata": { "name", "description", "seed", "bipartition" }
//! }
//! ```
//!
//! * `choi`: `matrix` is the unit-trace Choi state on (head, tail), row-major.
//! * `kraus`: `matrix` stacks the Kraus operators vertically, so it has
//!   `k · dim_head` rows and `dim_tail` columns.
//! * `superchannel`: `matrix` is absent; `ancilla_dim`, `v_matrix` (on head
//!   and ancilla) and `u_matrix` (on tail and ancilla) are present.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value round-trips exactly.

use std::io::{self, Write};
use std::path::Path;

use qvn_core::channel::{choi_of, Channel, ProgramState};
use qvn_core::covariant::{ProgramStateFamily, Sampling};
use qvn_core::superchannel::SuperchannelSpec;
use qvn_core::{Matrix, C64};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{QvnError, Result};

pub const PROGRAM_SCHEMA: &str = "qvn.program/1";
pub const FAMILY_SCHEMA: &str = "qvn.covariant-family/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Choi,
    Kraus,
    Superchannel,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Seed used to create the entry, if it was sampled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Head wires forming party A of a bipartite channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    pub schema: String,
    pub kind: Kind,
    pub dims_head: Vec<usize>,
    pub dims_tail: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_matrix: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_matrix: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub metadata: Metadata,
}

fn pairs(m: &Matrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn matrix(ctx: &str, field: &str, data: &[[f64; 2]], rows: usize, cols: usize) -> Result<Matrix> {
    if data.len() != rows * cols {
        return Err(QvnError::format(
            ctx,
            format!("`{field}` has {} entries, expected {rows}x{cols} = {}", data.len(), rows * cols),
        ));
    }
    if data.iter().flatten().any(|x| !x.is_finite()) {
        return Err(QvnError::format(ctx, format!("`{field}` contains non-finite values")));
    }
    Ok(Matrix::from_row_iterator(rows, cols, data.iter().map(|&[re, im]| C64::new(re, im))))
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl ProgramFile {
    pub fn from_program(p: &ProgramState, metadata: Metadata) -> Result<Self> {
        let p = p.canonical().map_err(|e| QvnError::core("program", e))?;
        Ok(Self {
            schema: PROGRAM_SCHEMA.into(),
            kind: Kind::Choi,
            dims_head: p.head_dims(),
            dims_tail: p.tail_dims(),
            matrix: Some(pairs(p.matrix())),
            ancilla_dim: None,
            v_matrix: None,
            u_matrix: None,
            metadata,
        })
    }

    /// Kraus-form file; fails for channels built without Kraus operators.
    pub fn from_channel(ch: &Channel, metadata: Metadata) -> Result<Self> {
        let kraus = ch.kraus().ok_or_else(|| QvnError::format("channel", "channel has no Kraus representation"))?;
        let mut data = Vec::new();
        for k in kraus {
            data.extend(pairs(k));
        }
        Ok(Self {
            schema: PROGRAM_SCHEMA.into(),
            kind: Kind::Kraus,
            dims_head: ch.dims_out().to_vec(),
            dims_tail: ch.dims_in().to_vec(),
            matrix: Some(data),
            ancilla_dim: None,
            v_matrix: None,
            u_matrix: None,
            metadata,
        })
    }

    pub fn from_superchannel(s: &SuperchannelSpec, metadata: Metadata) -> Self {
        Self {
            schema: PROGRAM_SCHEMA.into(),
            kind: Kind::Superchannel,
            dims_head: s.head_dims().to_vec(),
            dims_tail: s.tail_dims().to_vec(),
            matrix: None,
            ancilla_dim: Some(s.ancilla_dim()),
            v_matrix: Some(pairs(s.v())),
            u_matrix: Some(pairs(s.u())),
            metadata,
        }
    }

    fn check_schema(&self, ctx: &str) -> Result<()> {
        if self.schema != PROGRAM_SCHEMA {
            return Err(QvnError::format(ctx, format!("unsupported schema `{}` (expected `{PROGRAM_SCHEMA}`)", self.schema)));
        }
        if self.dims_head.is_empty() || self.dims_tail.is_empty() {
            return Err(QvnError::format(ctx, "`dims_head` and `dims_tail` must be non-empty"));
        }
        if self.dims_head.iter().chain(&self.dims_tail).any(|d| !(2..=64).contains(d)) {
            return Err(QvnError::format(ctx, "local dimensions must lie in 2..=64"));
        }
        let total = self.dims_head.iter().chain(&self.dims_tail).try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if total.is_none_or(|t| t > 4096) {
            return Err(QvnError::format(ctx, "program dimension exceeds 4096"));
        }
        Ok(())
    }

    /// Decode a `choi` or `kraus` document into a validated program.
    pub fn to_program(&self, ctx: &str) -> Result<ProgramState> {
        self.check_schema(ctx)?;
        let (dh, dt) = (product(&self.dims_head), product(&self.dims_tail));
        let data = self.matrix.as_deref().ok_or_else(|| QvnError::format(ctx, "missing `matrix`"))?;
        match self.kind {
            Kind::Choi => {
                let m = matrix(ctx, "matrix", data, dh * dt, dh * dt)?;
                ProgramState::from_choi_matrix(m, self.dims_head.clone(), self.dims_tail.clone())
                    .map_err(|e| QvnError::core(ctx, e))
            }
            Kind::Kraus => {
                let block = dh * dt;
                if data.is_empty() || data.len() % block != 0 {
                    return Err(QvnError::format(ctx, format!("Kraus data length {} is not a multiple of {block}", data.len())));
                }
                let kraus = data
                    .chunks(block)
                    .map(|chunk| matrix(ctx, "matrix", chunk, dh, dt))
                    .collect::<Result<Vec<_>>>()?;
                let ch = Channel::from_kraus(kraus, self.dims_tail.clone(), self.dims_head.clone())
                    .map_err(|e| QvnError::core(ctx, e))?;
                choi_of(&ch).map_err(|e| QvnError::core(ctx, e))
            }
            Kind::Superchannel => Err(QvnError::format(ctx, "expected a program, found a superchannel")),
        }
    }

    pub fn to_superchannel(&self, ctx: &str) -> Result<SuperchannelSpec> {
        self.check_schema(ctx)?;
        if self.kind != Kind::Superchannel {
            return Err(QvnError::format(ctx, "expected a superchannel document"));
        }
        let anc = self.ancilla_dim.ok_or_else(|| QvnError::format(ctx, "missing `ancilla_dim`"))?;
        if !(2..=64).contains(&anc) {
            return Err(QvnError::format(ctx, "`ancilla_dim` must lie in 2..=64"));
        }
        let (dh, dt) = (product(&self.dims_head) * anc, product(&self.dims_tail) * anc);
        let v = self.v_matrix.as_deref().ok_or_else(|| QvnError::format(ctx, "missing `v_matrix`"))?;
        let u = self.u_matrix.as_deref().ok_or_else(|| QvnError::format(ctx, "missing `u_matrix`"))?;
        let v = matrix(ctx, "v_matrix", v, dh, dh)?;
        let u = matrix(ctx, "u_matrix", u, dt, dt)?;
        SuperchannelSpec::new(v, u, self.dims_head.clone(), self.dims_tail.clone(), anc).map_err(|e| QvnError::core(ctx, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmSpec {
    /// `design` or `monte_carlo`.
    pub sampling: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub max_residual: f64,
}

impl PovmSpec {
    pub fn from_sampling(sampling: &Sampling, max_residual: f64) -> Self {
        match sampling {
            Sampling::Design => Self { sampling: "design".into(), samples: None, seed: None, max_residual },
            Sampling::MonteCarlo { samples, seed } => {
                Self { sampling: "monte_carlo".into(), samples: Some(*samples), seed: Some(*seed), max_residual }
            }
        }
    }

    pub fn to_sampling(&self, ctx: &str) -> Result<Sampling> {
        match self.sampling.as_str() {
            "design" => Ok(Sampling::Design),
            "monte_carlo" => match (self.samples, self.seed) {
                (Some(samples), Some(seed)) => Ok(Sampling::MonteCarlo { samples, seed }),
                _ => Err(QvnError::format(ctx, "monte_carlo sampling needs `samples` and `seed`")),
            },
            other => Err(QvnError::format(ctx, format!("unknown sampling `{other}`"))),
        }
    }
}

/// Serialized covariant program resource: the state `|Φ⟩` plus the POVM
/// recipe used to decode it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub sector_coefficients: Vec<f64>,
    pub phi: Vec<[f64; 2]>,
    pub povm: PovmSpec,
    #[serde(default)]
    pub metadata: Metadata,
}

impl FamilyFile {
    pub fn new(fam: &ProgramStateFamily, povm: PovmSpec, metadata: Metadata) -> Self {
        Self {
            schema: FAMILY_SCHEMA.into(),
            n: fam.n(),
            d: fam.d(),
            sector_coefficients: fam.sector_coefficients().to_vec(),
            phi: fam.phi().vector().iter().map(|z| [z.re, z.im]).collect(),
            povm,
            metadata,
        }
    }

    /// Rebuild the family from its coefficients and check `phi` against it.
    pub fn to_family(&self, ctx: &str) -> Result<ProgramStateFamily> {
        if self.schema != FAMILY_SCHEMA {
            return Err(QvnError::format(ctx, format!("unsupported schema `{}` (expected `{FAMILY_SCHEMA}`)", self.schema)));
        }
        if self.d != 2 {
            return Err(QvnError::format(ctx, "only d = 2 families are supported"));
        }
        let fam = ProgramStateFamily::from_coefficients(self.n, &self.sector_coefficients).map_err(|e| QvnError::core(ctx, e))?;
        let stored = matrix(ctx, "phi", &self.phi, self.phi.len(), 1)?;
        let built = fam.phi().vector();
        if stored.nrows() != built.len() || (0..built.len()).any(|i| (stored[(i, 0)] - built[i]).norm() > 1e-12) {
            return Err(QvnError::format(ctx, "`phi` does not match the sector coefficients"));
        }
        Ok(fam)
    }
}

/// Pretty JSON with every float in `{:.16e}` form.
struct SciFormatter(PrettyFormatter<'static>);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        // serde_json routes non-finite values to `write_null`.
        write!(w, "{v:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| QvnError::Json { context: "serialize".into(), source: e })?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, ctx: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QvnError::Json { context: ctx.into(), source: e })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| QvnError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| QvnError::io(path, e))
}

pub fn read_program_file(path: &Path) -> Result<ProgramFile> {
    from_json(&read_text(path)?, &path.display().to_string())
}

/// Load a program (Choi or Kraus document) from disk.
pub fn read_program(path: &Path) -> Result<(ProgramState, Metadata)> {
    let file = read_program_file(path)?;
    let p = file.to_program(&path.display().to_string())?;
    Ok((p, file.metadata))
}

pub fn write_program(path: &Path, p: &ProgramState, metadata: Metadata) -> Result<()> {
    write_text(path, &to_json(&ProgramFile::from_program(p, metadata)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qvn_core::channel::unitary_program;
    use qvn_core::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&vec![0.1f64, 1.0 / 3.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("3.3333333333333331e-1"));
        let back: Vec<f64> = from_json(&s, "t").unwrap();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
        assert_eq!(to_json(&f64::NAN).unwrap().trim(), "null");
    }

    #[test]
    fn program_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = Channel::random(2, 3, 2, &mut rng).unwrap();
        let p = choi_of(&ch).unwrap();
        let file = ProgramFile::from_program(&p, Metadata::default()).unwrap();
        let back: ProgramFile = from_json(&to_json(&file).unwrap(), "t").unwrap();
        let q = back.to_program("t").unwrap();
        assert_eq!(q.matrix(), p.matrix());
        assert_eq!(q.head_dims(), vec![3]);
    }

    #[test]
    fn kraus_document() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = Channel::random(3, 2, 3, &mut rng).unwrap();
        let file = ProgramFile::from_channel(&ch, Metadata::default()).unwrap();
        assert_eq!(file.matrix.as_ref().unwrap().len(), 3 * 2 * 3);
        let p = file.to_program("t").unwrap();
        assert!((p.matrix() - choi_of(&ch).unwrap().matrix()).camax() < 1e-14);
    }

    #[test]
    fn non_psd_rejected() {
        let p = unitary_program(&gates::h(), vec![2]).unwrap();
        let mut file = ProgramFile::from_program(&p, Metadata::default()).unwrap();
        let m = file.matrix.as_mut().unwrap();
        m[0][0] -= 1.0;
        m[15][0] += 1.0;
        assert!(matches!(file.to_program("t"), Err(QvnError::Validation { .. })));
    }

    #[test]
    fn schema_and_shape_checked() {
        let p = unitary_program(&gates::h(), vec![2]).unwrap();
        let mut file = ProgramFile::from_program(&p, Metadata::default()).unwrap();
        file.schema = "other/9".into();
        assert!(matches!(file.to_program("t"), Err(QvnError::Format { .. })));
        let mut file = ProgramFile::from_program(&p, Metadata::default()).unwrap();
        file.matrix.as_mut().unwrap().pop();
        assert!(matches!(file.to_program("t"), Err(QvnError::Format { .. })));
        let err = from_json::<ProgramFile>("{\"schema\": 1}", "t").unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn superchannel_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = SuperchannelSpec::random(vec![2], vec![2], 2, &mut rng).unwrap();
        let file = ProgramFile::from_superchannel(&s, Metadata::default());
        let back: ProgramFile = from_json(&to_json(&file).unwrap(), "t").unwrap();
        let t = back.to_superchannel("t").unwrap();
        assert_eq!(t.v(), s.v());
        assert_eq!(t.u(), s.u());
        assert!(back.to_program("t").is_err());
    }

    #[test]
    fn family_round_trip() {
        let fam = qvn_core::covariant::optimize_phi(2, 2, &Default::default()).unwrap();
        let file = FamilyFile::new(&fam, PovmSpec::from_sampling(&Sampling::Design, 1e-6), Metadata::default());
        let back: FamilyFile = from_json(&to_json(&file).unwrap(), "t").unwrap();
        let f2 = back.to_family("t").unwrap();
        assert_eq!(f2.phi(), fam.phi());
        assert_eq!(back.povm.to_sampling("t").unwrap(), Sampling::Design);
        let mut bad = back.clone();
        bad.phi[0][0] += 1e-3;
        assert!(bad.to_family("t").is_err());
    }
}
