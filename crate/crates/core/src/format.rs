//! Framing shared by every on-disk file.
//!
//! ```text
//! <MAGIC> <version>\n
//! <body lines>
//! #END <body byte length> <sha256 of body, hex>\n
//! ```
//!
//! The trailer makes truncation and corruption detectable before any of the
//! body is interpreted.

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("not a {expected} file (found header {found:?})")]
    BadMagic { expected: String, found: String },
    #[error("{magic} format version {found} is not supported (expected {expected})")]
    VersionMismatch {
        magic: String,
        found: u32,
        expected: u32,
    },
    #[error("corrupt file: {0}")]
    Corrupt(String),
}

pub fn frame(magic: &str, version: u32, body: &str) -> String {
    let mut body = body.to_string();
    if !body.is_empty() && !body.ends_with('\n') {
        body.push('\n');
    }
    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    format!("{magic} {version}\n{body}#END {} {digest}\n", body.len())
}

/// Checks header and trailer and returns the body.
pub fn unframe<'a>(magic: &str, version: u32, text: &'a str) -> Result<&'a str, FormatError> {
    let (header, rest) = text
        .split_once('\n')
        .ok_or_else(|| FormatError::Corrupt("missing header line".into()))?;
    let mut parts = header.split(' ');
    let found_magic = parts.next().unwrap_or_default();
    if found_magic != magic {
        return Err(FormatError::BadMagic {
            expected: magic.to_string(),
            found: header.to_string(),
        });
    }
    let found_version: u32 = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| FormatError::Corrupt(format!("bad header {header:?}")))?;
    if found_version != version {
        return Err(FormatError::VersionMismatch {
            magic: magic.to_string(),
            found: found_version,
            expected: version,
        });
    }
    let trailer_start = rest
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .unwrap_or(0);
    let (body, trailer) = rest.split_at(trailer_start);
    let trailer = trailer
        .strip_prefix("#END ")
        .and_then(|t| t.strip_suffix('\n'))
        .ok_or_else(|| FormatError::Corrupt("missing end marker (truncated?)".into()))?;
    let (len, digest) = trailer
        .split_once(' ')
        .ok_or_else(|| FormatError::Corrupt("malformed end marker".into()))?;
    if len.parse::<usize>().ok() != Some(body.len()) {
        return Err(FormatError::Corrupt(format!(
            "body length {} does not match recorded {len}",
            body.len()
        )));
    }
    if hex::encode(Sha256::digest(body.as_bytes())) != digest {
        return Err(FormatError::Corrupt("checksum mismatch".into()));
    }
    Ok(body)
}
