//! Binary policy checkpoints.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes      | content                                     |
//! |------------|---------------------------------------------|
//! | 8          | magic `b"ASTPOL01"`                         |
//! | 4          | `u32` number of layer sizes `L` (≥ 2)       |
//! | 4·L        | `u32` layer sizes, input first              |
//! | 8          | `u64` parameter count `P`                   |
//! | 8·P        | `f64` parameters in [`GaussianPolicy::params`] order |

use std::io::{Read, Write};

use super::{GaussianPolicy, Mlp, ParamVector};
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"ASTPOL01";

pub fn write_checkpoint<W: Write>(policy: &GaussianPolicy, mut w: W) -> Result<()> {
    let sizes = policy.mean.sizes();
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&(sizes.len() as u32).to_le_bytes())?;
    for s in &sizes {
        w.write_all(&(*s as u32).to_le_bytes())?;
    }
    let params = policy.params();
    w.write_all(&(params.len() as u64).to_le_bytes())?;
    for p in params.iter() {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<GaussianPolicy> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let n_sizes = read_u32(&mut r)? as usize;
    if !(2..=64).contains(&n_sizes) {
        return Err(Error::Checkpoint(format!("implausible layer count {n_sizes}")));
    }
    let sizes = (0..n_sizes)
        .map(|_| read_u32(&mut r).map(|s| s as usize))
        .collect::<Result<Vec<_>>>()?;
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::Checkpoint("zero layer size".into()));
    }
    let mut policy = GaussianPolicy::new(Mlp::zeros(&sizes), vec![0.0; *sizes.last().unwrap()]);
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let count = u64::from_le_bytes(buf) as usize;
    if count != policy.n_params() {
        return Err(Error::Checkpoint(format!(
            "parameter count {count} does not match layer sizes ({})",
            policy.n_params()
        )));
    }
    let mut params = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        params.push(f64::from_le_bytes(buf));
    }
    policy.set_params(&ParamVector(params))?;
    Ok(policy)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}
