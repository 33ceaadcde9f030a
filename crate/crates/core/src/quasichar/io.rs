//! Basis cache: a text header line, a JSON header line, then all operators as
//! little-endian `f64` pairs in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BasisElement, QuasiCharacterBasis, Side, SpinAssignment, SB_CONVENTION};
use crate::{CMatrix, Error, Result, C64};

const MAGIC: &str = "STRATA-LGT-BASIS";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: u32,
    n: usize,
    jmax_twice: u32,
    hbar: f64,
    beta: f64,
    s: f64,
    side: Side,
    convention: String,
    elements: Vec<ElementHeader>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ElementHeader {
    spins: Vec<u32>,
    coupled: u32,
    paths: (Vec<u32>, Vec<u32>),
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("basis cache: {}", msg.into()))
}

impl QuasiCharacterBasis {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            version: VERSION,
            n: self.n,
            jmax_twice: self.jmax_twice,
            hbar: self.hbar,
            beta: self.beta,
            s: self.s(),
            side: self.side,
            convention: SB_CONVENTION.to_string(),
            elements: self
                .elements
                .iter()
                .map(|e| ElementHeader { spins: e.spins.0.clone(), coupled: e.coupled, paths: e.paths.clone() })
                .collect(),
        };
        writeln!(w, "{MAGIC} v{VERSION}")?;
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for e in &self.elements {
            for z in e.operator.transpose().iter() {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        if line.trim_end() != format!("{MAGIC} v{VERSION}") {
            return Err(invalid(format!("unrecognized header {:?}", line.trim_end())));
        }
        line.clear();
        r.read_line(&mut line)?;
        let header: Header = serde_json::from_str(&line)?;
        if header.convention != SB_CONVENTION {
            return Err(invalid(format!("convention {:?} does not match {SB_CONVENTION:?}", header.convention)));
        }
        let mut elements = Vec::with_capacity(header.elements.len());
        let mut buf = [0u8; 8];
        for eh in header.elements {
            let spins = SpinAssignment(eh.spins);
            if spins.0.len() != header.n || spins.0.iter().any(|&m| m > header.jmax_twice) {
                return Err(invalid("element spins do not fit the header"));
            }
            let dim = spins.dim();
            let mut values = Vec::with_capacity(dim * dim);
            for _ in 0..dim * dim {
                r.read_exact(&mut buf).map_err(|_| invalid("payload is truncated"))?;
                let re = f64::from_le_bytes(buf);
                r.read_exact(&mut buf).map_err(|_| invalid("payload is truncated"))?;
                values.push(C64::new(re, f64::from_le_bytes(buf)));
            }
            let operator = CMatrix::from_row_slice(dim, dim, &values);
            elements.push(BasisElement { spins, coupled: eh.coupled, paths: eh.paths, operator });
        }
        if r.read(&mut buf)? != 0 {
            return Err(invalid("trailing bytes after payload"));
        }
        let mut blocks: Vec<(SpinAssignment, std::ops::Range<usize>)> = Vec::new();
        for (i, e) in elements.iter().enumerate() {
            match blocks.last_mut() {
                Some((s, range)) if *s == e.spins => range.end = i + 1,
                _ => blocks.push((e.spins.clone(), i..i + 1)),
            }
        }
        Ok(Self {
            n: header.n,
            jmax_twice: header.jmax_twice,
            hbar: header.hbar,
            beta: header.beta,
            side: header.side,
            elements,
            blocks,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}
