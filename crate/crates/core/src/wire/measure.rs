use serde::Serialize;

use super::{encode, Message, WireError};
use crate::primitives::Signature;
use crate::protocol::AuthPayload;

/// Encoded size of a message, split by field. Each field's count includes its
/// length prefix, so the parts add up to `total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub msg: &'static str,
    pub total: usize,
    pub fields: Vec<(&'static str, usize)>,
}

impl SizeReport {
    pub fn field(&self, name: &str) -> Option<usize> {
        self.fields
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| *s)
    }

    /// `{"msg":"M2","total":N,"fields":{...}}` with fields in wire order.
    pub fn to_json(&self) -> String {
        let fields: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).expect("str"), v))
            .collect();
        format!(
            "{{\"msg\":{},\"total\":{},\"fields\":{{{}}}}}",
            serde_json::to_string(self.msg).expect("str"),
            self.total,
            fields.join(",")
        )
    }
}

const PREFIX: usize = 2;
const KEY: usize = PREFIX + 32;
const SIG: usize = PREFIX + Signature::ENCODED_LEN;

fn payload_fields(p: &AuthPayload, fields: &mut Vec<(&'static str, usize)>) {
    fields.extend([
        ("proof", p.proof.encoded_len()),
        ("commitment", KEY),
        ("enc_key", KEY),
        ("verify_key", KEY),
        ("escrow", PREFIX + 64),
        ("escrow_proof", PREFIX + 128),
    ]);
}

pub fn measure(msg: &Message) -> Result<SizeReport, WireError> {
    let total = encode(msg)?.len();
    let mut fields = vec![("type_tag", 1)];
    match msg {
        Message::M1(m) | Message::HoM1(m) => {
            let c = &m.certificate;
            fields.push((
                "certificate",
                PREFIX + c.location().len() + 8 + PREFIX + c.gnb_id().len() + 8,
            ));
            fields.push(("signature", PREFIX + c.signature().encoded_len()));
        }
        Message::M2(m) => {
            payload_fields(&m.payload, &mut fields);
            fields.extend([("timestamp", 8), ("signature", SIG)]);
        }
        Message::M3(m) => {
            payload_fields(&m.payload, &mut fields);
            fields.extend([("timestamp", 8), ("signature", SIG)]);
        }
        Message::M4(m) => {
            fields.push(("ciphertext", PREFIX + m.ciphertext.len()));
            fields.push(("flag", 1));
            if let Some(ct) = &m.gnb_ciphertext {
                fields.push(("gnb_ciphertext", PREFIX + ct.len()));
            }
        }
        Message::HoM2(m) => {
            fields.extend([
                ("proof", m.proof.encoded_len()),
                ("commitment", KEY),
                ("enc_key", KEY),
                ("verify_key", KEY),
                ("signature", SIG),
                ("timestamp", 8),
            ]);
        }
        Message::HoM3(m) => fields.push(("ciphertext", PREFIX + m.ciphertext.len())),
        Message::Abort => {}
    }
    debug_assert_eq!(fields.iter().map(|(_, s)| s).sum::<usize>(), total);
    Ok(SizeReport {
        msg: msg.name(),
        total,
        fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::HoM3;

    #[test]
    fn json_shape() {
        let r = measure(&Message::HoM3(HoM3 {
            ciphertext: vec![0; 176],
        }))
        .unwrap();
        assert_eq!(r.total, 179);
        assert_eq!(
            r.to_json(),
            r#"{"msg":"HO-M3","total":179,"fields":{"type_tag":1,"ciphertext":178}}"#
        );
    }
}
