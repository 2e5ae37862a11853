//! Hex forms used at the command-line boundary.

use srpolar_core::Bit;

/// Packs bits MSB-first into hex digits, zero-padding the last digit on the
/// right.
pub fn encode_bits(bits: &[Bit]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |acc, (t, &b)| acc | (u32::from(b) << (3 - t)));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

/// LLR tokens separated by whitespace or commas. A token is a decimal
/// number or `0x` followed by the 16 hex digits of an IEEE-754 double.
pub fn parse_llrs(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
                Some(h) => u64::from_str_radix(h, 16)
                    .map(f64::from_bits)
                    .map_err(|_| format!("bad hex LLR `{t}`"))?,
                None => t.parse::<f64>().map_err(|_| format!("bad LLR `{t}`"))?,
            };
            if v.is_nan() {
                return Err(format!("LLR `{t}` is NaN"));
            }
            Ok(v)
        })
        .collect()
}
