//! Binary state dump: three little-endian `u64` dims `(atom, d1, d2)`
//! followed by `(Re, Im)` little-endian `f64` pairs in basis order.
//! Field-only states write `atom = 1`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{FockDims, FockError, FockState};

pub fn write_state_dump<W: Write>(s: &FockState, mut w: W) -> Result<(), FockError> {
    let d = s.dims();
    for v in [d.atom, d.d1, d.d2] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for a in s.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_state_dump<R: Read>(mut r: R) -> Result<FockState, FockError> {
    let mut word = [0u8; 8];
    let mut header = [0usize; 3];
    for h in header.iter_mut() {
        r.read_exact(&mut word)?;
        *h = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| FockError::MalformedDump("dimension overflows usize".into()))?;
    }
    let dims = match header {
        [1, d1, d2] => FockDims::field(d1, d2)?,
        [3, d1, d2] => FockDims::with_atom(d1, d2)?,
        [atom, ..] => return Err(FockError::MalformedDump(format!("atom dimension {atom}"))),
    };
    let mut amp = Vec::with_capacity(dims.len());
    for _ in 0..dims.len() {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        amp.push(Complex64::new(re, im));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(FockError::MalformedDump(format!("{} trailing bytes", rest.len())));
    }
    FockState::from_amplitudes(dims, amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let d = FockDims::field(2, 3).unwrap();
        let mut buf = Vec::new();
        write_state_dump(&FockState::basis(d, 0, 1, 2), &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 6 * 16);
        assert_eq!(&buf[..8], &1u64.to_le_bytes());
        assert_eq!(&buf[8..16], &2u64.to_le_bytes());
        assert_eq!(&buf[16..24], &3u64.to_le_bytes());
        // |1,2⟩ is index 5
        let off = 24 + 5 * 16;
        assert_eq!(&buf[off..off + 8], &1.0f64.to_le_bytes());
    }

    #[test]
    fn truncated_and_bad_headers() {
        let d = FockDims::with_atom(2, 2).unwrap();
        let mut buf = Vec::new();
        write_state_dump(&FockState::basis(d, 2, 1, 1), &mut buf).unwrap();
        assert!(read_state_dump(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(
            read_state_dump(&extra[..]),
            Err(FockError::MalformedDump(_))
        ));
        let mut bad = buf;
        bad[0] = 2;
        assert!(matches!(
            read_state_dump(&bad[..]),
            Err(FockError::MalformedDump(_))
        ));
    }

    proptest! {
        #[test]
        fn roundtrip(vals in proptest::collection::vec(-1e3f64..1e3, 2 * 3 * 4 * 4), atom in prop::bool::ANY) {
            let dims = if atom { FockDims::with_atom(4, 4).unwrap() } else { FockDims::field(4, 4).unwrap() };
            let amp: Vec<_> = vals.chunks(2).take(dims.len()).map(|c| Complex64::new(c[0], c[1])).collect();
            let s = FockState::from_amplitudes(dims, amp).unwrap();
            let mut buf = Vec::new();
            write_state_dump(&s, &mut buf).unwrap();
            prop_assert_eq!(read_state_dump(&buf[..]).unwrap(), s);
        }
    }
}
