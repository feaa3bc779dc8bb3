//! Little-endian binary read/write helpers shared by the file formats.
//!
//! Readers track their byte offset so every failure is positioned.

use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub(crate) struct Reader<R> {
    inner: R,
    path: PathBuf,
    pos: u64,
}

impl<R: Read> Reader<R> {
    pub fn new(inner: R, path: &Path) -> Self {
        Self {
            inner,
            path: path.to_path_buf(),
            pos: 0,
        }
    }

    pub fn fail(&self, msg: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.clone(),
            offset: self.pos,
            msg: msg.into(),
        }
    }

    pub fn bytes(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut buf = vec![0u8; n];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| self.fail("unexpected end of file"))?;
        self.pos += n as u64;
        Ok(buf)
    }

    pub fn magic(&mut self, expected: &[u8; 4], what: &str) -> Result<()> {
        let got = self.bytes(4)?;
        if got != expected {
            self.pos = 0;
            return Err(self.fail(format!("not a {what} file (bad magic)")));
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    pub fn f32_vec(&mut self, n: usize) -> Result<Vec<f32>> {
        let raw = self.bytes(n * 4)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn f64_vec(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.bytes(n * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// u32 length-prefixed UTF-8 string.
    pub fn string(&mut self, max_len: u32) -> Result<String> {
        let len = self.u32()?;
        if len > max_len {
            return Err(self.fail(format!("string length {len} exceeds limit {max_len}")));
        }
        String::from_utf8(self.bytes(len as usize)?).map_err(|_| self.fail("invalid UTF-8"))
    }

    pub fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8];
        match self.inner.read(&mut probe) {
            Ok(0) => Ok(()),
            Ok(_) => Err(self.fail("trailing data")),
            Err(e) => Err(Error::Io(e)),
        }
    }
}

pub(crate) struct Writer<W> {
    inner: W,
}

impl<W: Write> Writer<W> {
    pub fn new(inner: W) -> Self {
        Self { inner }
    }

    pub fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.inner.write_all(b)?;
        Ok(())
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.bytes(&[v])
    }

    pub fn u16(&mut self, v: u16) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn f32(&mut self, v: f32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    pub fn string(&mut self, s: &str) -> Result<()> {
        self.u32(s.len() as u32)?;
        self.bytes(s.as_bytes())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Accumulates the bytes of a record so a trailing checksum can cover them.
pub(crate) struct ChecksumWriter {
    pub buf: Vec<u8>,
}

impl ChecksumWriter {
    pub fn new() -> Self {
        Self { buf: Vec::new() }
    }
}

impl Write for ChecksumWriter {
    fn write(&mut self, data: &[u8]) -> std::io::Result<usize> {
        self.buf.extend_from_slice(data);
        Ok(data.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}
