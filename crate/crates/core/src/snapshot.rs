//! Trajectory persistence.
//!
//! JSON: `{"config": {...}, "times": [...], "states": [{"N": .., "coeffs": [[re, im], ..]}, ..]}`.
//!
//! Binary coefficient dump (all little-endian):
//!
//! ```text
//! "BOPERT01"            8 bytes magic
//! N                     u64
//! repeated per sample:  t: f64, then (re, im): f64 x 2 for n = 0..=N
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::spectral::TorusField;

pub const BINARY_MAGIC: &[u8; 8] = b"BOPERT01";

pub fn to_json(traj: &Trajectory) -> Result<String> {
    Ok(serde_json::to_string(traj)?)
}

pub fn from_json(text: &str) -> Result<Trajectory> {
    let traj: Trajectory = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    validate(&traj)?;
    Ok(traj)
}

fn validate(traj: &Trajectory) -> Result<()> {
    if traj.times.len() != traj.states.len() {
        return Err(Error::Format(format!(
            "{} times but {} states",
            traj.times.len(),
            traj.states.len()
        )));
    }
    if traj.times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Format("times are not strictly increasing".into()));
    }
    if let Some(first) = traj.states.first() {
        if traj.states.iter().any(|s| s.modes() != first.modes()) {
            return Err(Error::Format("states do not share N".into()));
        }
    }
    Ok(())
}

pub fn save_snapshot(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, traj)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<Trajectory> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text).map_err(|e| {
        if e.kind() == std::io::ErrorKind::InvalidData {
            Error::Format("snapshot is not UTF-8 JSON (binary dump?)".into())
        } else {
            Error::Io(e)
        }
    })?;
    from_json(&text)
}

/// Sampled coefficients read back from a binary dump.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientDump {
    pub modes: usize,
    pub times: Vec<f64>,
    pub states: Vec<TorusField>,
}

pub fn write_binary<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    let modes = traj.config.modes;
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(modes as u64).to_le_bytes())?;
    for (t, state) in traj.iter() {
        if state.modes() != modes {
            return Err(Error::Format(format!(
                "state has {} modes, header says {modes}",
                state.modes()
            )));
        }
        w.write_all(&t.to_le_bytes())?;
        for c in state.coeffs() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_f64(bytes: &[u8]) -> f64 {
    f64::from_le_bytes(bytes.try_into().expect("8-byte chunk"))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CoefficientDump> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    if data.len() < 16 || &data[..8] != BINARY_MAGIC {
        return Err(Error::Format("missing BOPERT01 header".into()));
    }
    let modes = u64::from_le_bytes(data[8..16].try_into().expect("8 bytes")) as usize;
    let record = 8 * (1 + 2 * (modes + 1));
    let body = &data[16..];
    if modes == 0 || body.len() % record != 0 {
        return Err(Error::Format(format!(
            "body of {} bytes does not hold whole records for N = {modes}",
            body.len()
        )));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for chunk in body.chunks_exact(record) {
        times.push(read_f64(&chunk[..8]));
        let coeffs = chunk[8..]
            .chunks_exact(16)
            .map(|c| Complex64::new(read_f64(&c[..8]), read_f64(&c[8..])))
            .collect();
        states.push(TorusField::from_coeffs(coeffs)?);
    }
    Ok(CoefficientDump {
        modes,
        times,
        states,
    })
}

pub fn save_binary(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_binary(traj, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_binary(path: &Path) -> Result<CoefficientDump> {
    read_binary(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::SolverConfig;
    use crate::multipliers::zero_symbol;

    fn empty() -> Trajectory {
        Trajectory {
            config: SolverConfig::new(4, zero_symbol()),
            times: vec![],
            states: vec![],
        }
    }

    #[test]
    fn empty_trajectory_round_trips() {
        let traj = empty();
        assert_eq!(from_json(&to_json(&traj).unwrap()).unwrap(), traj);
        let mut bytes = Vec::new();
        write_binary(&traj, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 16);
        let dump = read_binary(bytes.as_slice()).unwrap();
        assert_eq!(dump.modes, 4);
        assert!(dump.times.is_empty());
    }

    #[test]
    fn header_mismatch_is_format_error() {
        let mut bytes = Vec::new();
        write_binary(&empty(), &mut bytes).unwrap();
        bytes[7] = b'2';
        assert!(matches!(read_binary(bytes.as_slice()), Err(Error::Format(_))));
        assert!(matches!(read_binary(&b"BOPERT01"[..]), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_body_is_format_error() {
        let mut traj = empty();
        traj.times.push(0.0);
        traj.states.push(TorusField::zeros(4));
        let mut bytes = Vec::new();
        write_binary(&traj, &mut bytes).unwrap();
        bytes.pop();
        assert!(matches!(read_binary(bytes.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn unordered_times_rejected() {
        let mut traj = empty();
        traj.times = vec![0.0, 0.0];
        traj.states = vec![TorusField::zeros(4), TorusField::zeros(4)];
        assert!(from_json(&to_json(&traj).unwrap()).is_err());
    }
}
