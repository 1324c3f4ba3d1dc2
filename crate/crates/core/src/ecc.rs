//! Binary code for block edit errors built on the document-exchange
//! sketches.
//!
//! Encoding masks the message with generator output so that the masked
//! message `msg_P` contains no buffer pattern and has distinct length-`B`
//! windows, sketches `msg_P` with enlarged budgets, and appends the sketch
//! and the mask seeds in armored form:
//!
//! ```text
//! msg_P ∘ buf ∘ chunk_0 ∘ buf ∘ chunk_1 ∘ …
//! ```
//!
//! Each chunk carries an index and a slice of a Reed-Solomon codeword over
//! the sketch bits, so the decoder can place chunks after transpositions
//! and treat missing or conflicting ones as erasures. Decoding strips every
//! buffer and the chunk after it, rebuilds the sketch, recovers `msg_P`
//! from what is left and removes the mask.

use std::collections::HashMap;

use crate::bdistinct::{self, is_b_distinct};
use crate::container::{Reader, Writer, CODEWORD_MAGIC};
use crate::levels;
use crate::prg::{Generator, GeneratorParams, Seed};
use crate::rs::{rs_decode, rs_parity, SymbolVector};
use crate::{bits, clog2, Error, Result, Variant};

/// Chunk-level capacity multiplier `c_a`.
pub const C_A: usize = 8;
/// Sketch operation budget `K_MUL · k + 1`.
pub const K_MUL: usize = 2;
/// Extra sketch bit budget `T_MUL · k · (l_buf + chunk_len)`.
pub const T_MUL: usize = 2;
/// Seed candidates tried before giving up.
pub const MAX_SEED_ATTEMPTS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecParams {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub variant: Variant,
    pub l_buf: usize,
    /// Bits after each buffer, index header included.
    pub chunk_len: usize,
    /// Budgets the sketch is built for.
    pub k_sketch: usize,
    pub t_sketch: usize,
    pub prg: GeneratorParams,
}

impl CodecParams {
    pub fn new(n: usize, k: usize, t: usize, variant: Variant) -> Result<Self> {
        if n < 16 {
            return Err(Error::Precondition(format!("message of {n} bits is too short")));
        }
        let lg = clog2(n);
        let l_buf = 2 * lg;
        let chunk_len = l_buf - 2;
        let prg = GeneratorParams::new(n as u64, (3 * lg) as u32, (3 * lg) as u32)?;
        Ok(CodecParams {
            n,
            k,
            t,
            variant,
            l_buf,
            chunk_len,
            k_sketch: K_MUL * k + 1,
            t_sketch: t + T_MUL * k * (l_buf + chunk_len),
            prg,
        })
    }

    /// `B` for the distinctness requirement on `msg_P`.
    pub fn b(&self) -> usize {
        3 * clog2(self.n)
    }

    pub fn buf(&self) -> Vec<u8> {
        let mut b = vec![0u8; self.l_buf];
        b[self.l_buf - 1] = 1;
        b
    }

    fn seed_bits(&self) -> usize {
        2 * self.prg.seed_length()
    }

    /// Serialized sketch size in bytes, fixed by the parameters.
    pub fn sketch_bytes(&self) -> Result<usize> {
        match self.variant {
            Variant::Levels => Ok(levels::sketch_byte_len(self.n, self.k_sketch, self.t_sketch)),
            Variant::BDistinct => bdistinct::sketch_byte_len(self.n, self.k_sketch, self.t_sketch),
        }
    }

    /// RS distance over armor symbols.
    pub fn armor_distance(&self) -> usize {
        2 * C_A * (self.k + self.t.div_ceil(clog2(self.n))) + 1
    }

    /// Codeword length minus message length.
    pub fn redundancy(&self) -> Result<usize> {
        Ok(self.armor_layout()?.chunks * (self.l_buf + self.chunk_len))
    }

    pub fn armor_layout(&self) -> Result<ArmorLayout> {
        let payload_bits = 8 * self.sketch_bytes()? + self.seed_bits();
        ArmorLayout::new(payload_bits, self.armor_distance(), self.chunk_len)
    }
}

/// How sketch bits map onto chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmorLayout {
    pub payload_bits: usize,
    /// RS symbol width.
    pub m: u32,
    pub data_symbols: usize,
    pub distance: usize,
    /// Index bits per chunk.
    pub index_bits: usize,
    /// Symbol bits per chunk.
    pub slice_bits: usize,
    /// Chunks per symbol.
    pub span: usize,
    pub chunks: usize,
}

impl ArmorLayout {
    pub fn new(payload_bits: usize, distance: usize, chunk_len: usize) -> Result<Self> {
        let mut m = 2u32;
        let data_symbols = loop {
            if m > 64 {
                return Err(Error::TooLarge("armor needs more than 64-bit symbols".into()));
            }
            let ds = payload_bits.div_ceil(m as usize);
            if ((ds + distance - 1) as u128) < (1u128 << m) {
                break ds;
            }
            m += 1;
        };
        let symbols = data_symbols + distance - 1;
        let mut index_bits = 1;
        loop {
            if index_bits >= chunk_len {
                return Err(Error::TooLarge(format!(
                    "{symbols} armor symbols do not fit {chunk_len}-bit chunks"
                )));
            }
            let slice_bits = chunk_len - index_bits;
            let span = (m as usize).div_ceil(slice_bits);
            let chunks = symbols * span;
            if clog2(chunks.max(2)) <= index_bits {
                return Ok(ArmorLayout {
                    payload_bits,
                    m,
                    data_symbols,
                    distance,
                    index_bits,
                    slice_bits,
                    span,
                    chunks,
                });
            }
            index_bits += 1;
        }
    }
}

/// Indexed chunks carrying `payload` under RS protection.
pub fn armor_encode(payload: &[u8], layout: &ArmorLayout) -> Result<Vec<Vec<u8>>> {
    if payload.len() != layout.payload_bits {
        return Err(Error::Precondition("payload length disagrees with the layout".into()));
    }
    let m = layout.m as usize;
    let mut padded = payload.to_vec();
    padded.resize(layout.data_symbols * m, 0);
    let data: Vec<u128> = padded.chunks(m).map(bits::to_uint).collect();
    let data = SymbolVector::new(data, layout.m)?;
    let parity = rs_parity(&data, layout.distance)?;
    let mut chunks = Vec::with_capacity(layout.chunks);
    for (s, &sym) in data.symbols.iter().chain(&parity.symbols).enumerate() {
        let mut sb = bits::uint_bits(sym, m);
        sb.resize(layout.span * layout.slice_bits, 0);
        for (g, slice) in sb.chunks(layout.slice_bits).enumerate() {
            let mut c = bits::uint_bits((s * layout.span + g) as u128, layout.index_bits);
            c.extend_from_slice(slice);
            chunks.push(c);
        }
    }
    Ok(chunks)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArmorStats {
    pub errors: usize,
    pub erasures: usize,
}

/// Rebuild the payload from whatever chunks were found. Chunks shorter
/// than the chunk length are ignored.
pub fn armor_decode(chunks: &[Vec<u8>], layout: &ArmorLayout) -> Result<(Vec<u8>, ArmorStats)> {
    let ib = layout.index_bits;
    let full = ib + layout.slice_bits;
    let mut slots: HashMap<usize, Option<&[u8]>> = HashMap::new();
    for c in chunks.iter().filter(|c| c.len() == full) {
        let idx = bits::to_uint(&c[..ib]) as usize;
        if idx >= layout.chunks {
            continue;
        }
        let body = &c[ib..];
        slots
            .entry(idx)
            .and_modify(|s| {
                if *s != Some(body) {
                    *s = None;
                }
            })
            .or_insert(Some(body));
    }
    let m = layout.m as usize;
    let total = layout.data_symbols + layout.distance - 1;
    let mut symbols = vec![0u128; total];
    let mut erasures = Vec::new();
    'sym: for (s, slot) in symbols.iter_mut().enumerate() {
        let mut sb = Vec::with_capacity(layout.span * layout.slice_bits);
        for g in 0..layout.span {
            match slots.get(&(s * layout.span + g)) {
                Some(Some(body)) => sb.extend_from_slice(body),
                _ => {
                    erasures.push(s);
                    continue 'sym;
                }
            }
        }
        if sb[m..].iter().any(|&b| b != 0) {
            erasures.push(s);
            continue;
        }
        *slot = bits::to_uint(&sb[..m]);
    }
    let data = SymbolVector { symbols: symbols[..layout.data_symbols].to_vec(), m: layout.m };
    let parity = SymbolVector { symbols: symbols[layout.data_symbols..].to_vec(), m: layout.m };
    let dec = rs_decode(&data, &parity, layout.distance, &erasures)
        .map_err(|e| Error::DecodeFailed(format!("sketch armor: {e}")))?;
    let mut out = Vec::with_capacity(layout.data_symbols * m);
    for &s in &dec.data.symbols {
        bits::push_uint(&mut out, s, m);
    }
    out.truncate(layout.payload_bits);
    Ok((out, ArmorStats { errors: dec.errors, erasures: dec.erasures }))
}

/// One buffer occurrence and the chunk read after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BufferHit {
    /// Offset just past the buffer's final 1.
    pub end: usize,
    pub chunk: Vec<u8>,
}

/// Find every buffer (a 1 preceded by at least `l_buf - 1` zeros) and
/// take up to `chunk_len` bits after it, stopping early at the next
/// buffer. Returns the hits and the bits that belong to neither.
pub fn scan_buffers(c: &[u8], l_buf: usize, chunk_len: usize) -> (Vec<BufferHit>, Vec<u8>) {
    let mut ends = Vec::new();
    let mut zeros = 0usize;
    for (i, &b) in c.iter().enumerate() {
        if b == 1 {
            if zeros >= l_buf - 1 {
                ends.push(i + 1);
            }
            zeros = 0;
        } else {
            zeros += 1;
        }
    }
    let mut hits = Vec::with_capacity(ends.len());
    let mut message = Vec::with_capacity(c.len());
    let mut pos = 0;
    for (h, &end) in ends.iter().enumerate() {
        let start = end - l_buf;
        if start > pos {
            message.extend_from_slice(&c[pos..start]);
        }
        let next_start = ends.get(h + 1).map_or(c.len(), |&e| e - l_buf);
        let stop = (end + chunk_len).min(next_start).min(c.len());
        hits.push(BufferHit { end, chunk: c[end..stop].to_vec() });
        pos = stop;
    }
    if pos < c.len() {
        message.extend_from_slice(&c[pos..]);
    }
    (hits, message)
}

/// True if `s` contains `0^(l_buf-1) 1`.
pub fn contains_buf(s: &[u8], l_buf: usize) -> bool {
    let mut zeros = 0;
    for &b in s {
        if b == 1 {
            if zeros >= l_buf - 1 {
                return true;
            }
            zeros = 0;
        } else {
            zeros += 1;
        }
    }
    false
}

/// The two sub-seeds tried at enumeration step `counter`.
pub fn candidate_seeds(counter: u64, params: &CodecParams) -> (Seed, Seed) {
    let m = params.prg.field_bits();
    (Seed::from_counter(2 * counter, m), Seed::from_counter(2 * counter + 1, m))
}

/// `g(r1) ⊕ g(r2)` over the first `n` positions.
pub fn prg_mask(params: &CodecParams, seeds: (Seed, Seed)) -> Result<Vec<u8>> {
    let a = Generator::new(params.prg, seeds.0)?.eval_window(1, params.n)?;
    let b = Generator::new(params.prg, seeds.1)?.eval_window(1, params.n)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x ^ y).collect())
}

pub fn seed_is_good(msg_p: &[u8], params: &CodecParams) -> bool {
    !contains_buf(msg_p, params.l_buf) && is_b_distinct(msg_p, params.b())
}

/// First seed pair whose mask makes the message buffer free and
/// `B`-distinct, with the number of candidates tried.
pub fn find_good_seed(msg: &[u8], params: &CodecParams) -> Result<((Seed, Seed), u64)> {
    for counter in 0..MAX_SEED_ATTEMPTS {
        let seeds = candidate_seeds(counter, params);
        let mask = prg_mask(params, seeds)?;
        let msg_p: Vec<u8> = msg.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
        if seed_is_good(&msg_p, params) {
            return Ok((seeds, counter + 1));
        }
    }
    Err(Error::SeedExhausted(MAX_SEED_ATTEMPTS))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub params: CodecParams,
    pub bits: Vec<u8>,
}

impl Codeword {
    pub fn redundancy(&self) -> usize {
        self.bits.len() - self.params.n
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        write_codeword(&self.params, &self.bits)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Codeword> {
        let (params, bits) = read_codeword(bytes)?;
        Ok(Codeword { params, bits })
    }
}

/// `BSC1`: message length, budgets, variant, then the (possibly
/// corrupted) codeword bits.
pub fn write_codeword(params: &CodecParams, bits: &[u8]) -> Vec<u8> {
    let mut w = Writer::new(CODEWORD_MAGIC);
    w.u64(params.n as u64);
    w.u32(params.k as u32);
    w.u32(params.t as u32);
    w.u8(params.variant.tag());
    w.bits(bits);
    w.finish()
}

pub fn read_codeword(bytes: &[u8]) -> Result<(CodecParams, Vec<u8>)> {
    let mut r = Reader::new(bytes, CODEWORD_MAGIC)?;
    let n = r.usize64()?;
    let k = r.usize32()?;
    let t = r.usize32()?;
    let variant = Variant::from_tag(r.u8()?)?;
    let bits = r.bits()?;
    r.expect_done()?;
    Ok((CodecParams::new(n, k, t, variant)?, bits))
}

fn sketch_bytes_of(msg_p: &[u8], params: &CodecParams) -> Result<Vec<u8>> {
    Ok(match params.variant {
        Variant::Levels => levels::alice_sketch(msg_p, params.k_sketch, params.t_sketch)?.to_bytes(),
        Variant::BDistinct => {
            bdistinct::sketch_rand(msg_p, params.k_sketch, params.t_sketch)?.to_bytes()
        }
    })
}

pub fn encode(msg: &[u8], k: usize, t: usize, variant: Variant) -> Result<Codeword> {
    let params = CodecParams::new(msg.len(), k, t, variant)?;
    let (seeds, _) = find_good_seed(msg, &params)?;
    let mask = prg_mask(&params, seeds)?;
    let msg_p: Vec<u8> = msg.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
    let sketch = sketch_bytes_of(&msg_p, &params)?;
    let expected = params.sketch_bytes()?;
    if sketch.len() != expected {
        return Err(Error::Format(format!(
            "sketch has {} bytes, layout expects {expected}",
            sketch.len()
        )));
    }
    let m = params.prg.field_bits();
    let mut payload = bits::from_bytes(&sketch);
    payload.extend(seeds.0.to_bits(m));
    payload.extend(seeds.1.to_bits(m));
    let layout = params.armor_layout()?;
    let buf = params.buf();
    let mut out = msg_p;
    for chunk in armor_encode(&payload, &layout)? {
        out.extend_from_slice(&buf);
        out.extend_from_slice(&chunk);
    }
    Ok(Codeword { params, bits: out })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeReport {
    pub buffers_found: usize,
    pub armor: ArmorStats,
    pub message_part_len: usize,
}

pub fn decode(received: &[u8], params: &CodecParams) -> Result<Vec<u8>> {
    Ok(decode_report(received, params)?.0)
}

pub fn decode_report(received: &[u8], params: &CodecParams) -> Result<(Vec<u8>, DecodeReport)> {
    let (hits, message) = scan_buffers(received, params.l_buf, params.chunk_len);
    let layout = params.armor_layout()?;
    let chunks: Vec<Vec<u8>> = hits.into_iter().map(|h| h.chunk).collect();
    let mut report = DecodeReport {
        buffers_found: chunks.len(),
        message_part_len: message.len(),
        ..Default::default()
    };
    let (payload, stats) = armor_decode(&chunks, &layout)?;
    report.armor = stats;
    let sk_len = 8 * params.sketch_bytes()?;
    let sketch = bits::pack(&payload[..sk_len]);
    let m = params.prg.field_bits() as usize;
    let s1 = Seed::from_bits(&payload[sk_len..sk_len + 2 * m], m as u32)?;
    let s2 = Seed::from_bits(&payload[sk_len + 2 * m..], m as u32)?;
    let msg_p = match params.variant {
        Variant::Levels => levels::bob_recover(&message, &levels::Sketch::from_bytes(&sketch)?),
        Variant::BDistinct => {
            bdistinct::recover_rand(&message, &bdistinct::BdSketch::from_bytes(&sketch)?)
        }
    }
    .map_err(|e| Error::DecodeFailed(format!("message recovery: {e}")))?;
    if msg_p.len() != params.n {
        return Err(Error::DecodeFailed("recovered message has the wrong length".into()));
    }
    let mask = prg_mask(params, (s1, s2))?;
    Ok((msg_p.iter().zip(&mask).map(|(a, b)| a ^ b).collect(), report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_examples() {
        let (hits, msg) = scan_buffers(&[0; 30], 10, 8);
        assert!(hits.is_empty());
        assert_eq!(msg.len(), 30);
        let mut two = vec![0u8; 9];
        two.push(1);
        two.extend_from_within(..);
        let (hits, msg) = scan_buffers(&two, 10, 0);
        assert_eq!(hits.len(), 2);
        assert!(msg.is_empty());
    }

    #[test]
    fn zero_message_is_buffer_free_but_not_distinct() {
        let p = CodecParams::new(1 << 10, 1, 0, Variant::Levels).unwrap();
        let z = vec![0u8; 1 << 10];
        assert!(!contains_buf(&z, p.l_buf));
        assert!(!seed_is_good(&z, &p));
    }

    #[test]
    fn armor_round_trip_with_losses() {
        let layout = ArmorLayout::new(300, 9, 18).unwrap();
        let payload: Vec<u8> = (0..300).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let mut chunks = armor_encode(&payload, &layout).unwrap();
        chunks.swap(0, 5);
        chunks.remove(10);
        chunks[3][16] ^= 1;
        let (got, _) = armor_decode(&chunks, &layout).unwrap();
        assert_eq!(got, payload);
    }
}
