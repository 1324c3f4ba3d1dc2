//! Byte containers for sketches and codewords.
//!
//! Integers are little-endian and fixed width. A bit string is written as
//! a `u64` bit length followed by its bits packed MSB-first and padded to a
//! byte boundary.

use crate::{bits, Error, Result, Variant};

pub const SKETCH_MAGIC: &[u8; 4] = b"BSX1";
pub const CODEWORD_MAGIC: &[u8; 4] = b"BSC1";
pub const BITS_MAGIC: &[u8; 4] = b"BSB1";

#[derive(Debug, Default, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4]) -> Self {
        Writer { buf: magic.to_vec() }
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bits(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.buf.extend_from_slice(&bits::pack(b));
    }

    /// Each value as `width` big-endian bits, as one bit string.
    pub fn symbols(&mut self, values: &[u128], width: usize) {
        let mut b = Vec::with_capacity(values.len() * width);
        for &v in values {
            bits::push_uint(&mut b, v, width);
        }
        self.bits(&b);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        if buf.len() < 4 || &buf[..4] != magic {
            return Err(Error::Format(format!(
                "missing magic {}",
                String::from_utf8_lossy(magic)
            )));
        }
        Ok(Reader { buf, pos: 4 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated container at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn bits(&mut self) -> Result<Vec<u8>> {
        let len = self.u64()?;
        let len = usize::try_from(len)
            .ok()
            .filter(|&l| l / 8 <= self.buf.len())
            .ok_or_else(|| Error::Format(format!("bit length {len} too large")))?;
        let bytes = self.take(len.div_ceil(8))?;
        bits::unpack(bytes, len)
    }

    pub fn symbols(&mut self, width: usize) -> Result<Vec<u128>> {
        let b = self.bits()?;
        if width == 0 || b.len() % width != 0 {
            return Err(Error::Format(format!(
                "{} bits do not split into {width}-bit symbols",
                b.len()
            )));
        }
        Ok(b.chunks(width).map(bits::to_uint).collect())
    }

    pub fn usize32(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn usize64(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("length overflows usize".into()))
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }

    pub fn expect_done(&self) -> Result<()> {
        if self.is_done() {
            Ok(())
        } else {
            Err(Error::Format(format!(
                "{} trailing bytes in container",
                self.buf.len() - self.pos
            )))
        }
    }
}

/// Fixed header shared by both sketch variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchHeader {
    pub n_true: u64,
    pub n_padded: u64,
    pub k: u32,
    pub t: u32,
    /// Number of hashing levels.
    pub levels: u32,
    /// Hash output width (LEVELS) or prefix length B (BDIST).
    pub q: u32,
    pub variant: Variant,
    /// The sketch is the input itself.
    pub pass_through: bool,
}

impl SketchHeader {
    pub fn write(&self, w: &mut Writer) {
        w.u64(self.n_true);
        w.u64(self.n_padded);
        w.u32(self.k);
        w.u32(self.t);
        w.u32(self.levels);
        w.u32(self.q);
        w.u8(self.variant.tag());
        w.u8(self.pass_through as u8);
    }

    pub fn read(r: &mut Reader) -> Result<Self> {
        let h = SketchHeader {
            n_true: r.u64()?,
            n_padded: r.u64()?,
            k: r.u32()?,
            t: r.u32()?,
            levels: r.u32()?,
            q: r.u32()?,
            variant: Variant::from_tag(r.u8()?)?,
            pass_through: match r.u8()? {
                0 => false,
                1 => true,
                other => return Err(Error::Format(format!("bad pass-through flag {other}"))),
            },
        };
        if h.n_true > h.n_padded {
            return Err(Error::Format("true length exceeds padded length".into()));
        }
        Ok(h)
    }
}

/// Peek at a sketch's variant without parsing the rest.
pub fn sketch_variant(bytes: &[u8]) -> Result<Variant> {
    let mut r = Reader::new(bytes, SKETCH_MAGIC)?;
    Ok(SketchHeader::read(&mut r)?.variant)
}

/// `BSB1`: a bare bit string.
pub fn write_bit_file(b: &[u8]) -> Vec<u8> {
    let mut w = Writer::new(BITS_MAGIC);
    w.bits(b);
    w.finish()
}

pub fn read_bit_file(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut r = Reader::new(bytes, BITS_MAGIC)?;
    let b = r.bits()?;
    r.expect_done()?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let h = SketchHeader {
            n_true: 1000,
            n_padded: 1024,
            k: 4,
            t: 64,
            levels: 3,
            q: 40,
            variant: Variant::Levels,
            pass_through: false,
        };
        let mut w = Writer::new(SKETCH_MAGIC);
        h.write(&mut w);
        w.symbols(&[1, 2, 3], 5);
        let bytes = w.finish();
        assert_eq!(&bytes[..4], b"BSX1");
        let mut r = Reader::new(&bytes, SKETCH_MAGIC).unwrap();
        assert_eq!(SketchHeader::read(&mut r).unwrap(), h);
        assert_eq!(r.symbols(5).unwrap(), vec![1, 2, 3]);
        r.expect_done().unwrap();
    }

    #[test]
    fn truncation_is_an_error() {
        let bytes = write_bit_file(&[1, 0, 1, 1, 0, 1, 0, 1, 1]);
        assert_eq!(read_bit_file(&bytes).unwrap(), vec![1, 0, 1, 1, 0, 1, 0, 1, 1]);
        assert!(read_bit_file(&bytes[..bytes.len() - 1]).is_err());
        assert!(read_bit_file(b"XXXX").is_err());
    }
}
