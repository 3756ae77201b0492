use super::{decode, encode, Message, WireError};

/// The 5G control-plane message a protocol payload piggybacks on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Container {
    Sib1 = 0x01,
    RrcSetupComplete = 0x02,
    InitialUeMessage = 0x03,
    AuthenticationRequest = 0x04,
    RrcReestablishmentComplete = 0x05,
    DlInformationTransfer = 0x06,
    AuthenticationReject = 0x07,
}

impl Container {
    pub const ALL: [Container; 7] = [
        Container::Sib1,
        Container::RrcSetupComplete,
        Container::InitialUeMessage,
        Container::AuthenticationRequest,
        Container::RrcReestablishmentComplete,
        Container::DlInformationTransfer,
        Container::AuthenticationReject,
    ];

    pub fn from_byte(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|c| *c as u8 == b)
    }

    /// Carrier for each message type.
    pub fn for_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            super::TAG_M1 | super::TAG_HO_M1 => Container::Sib1,
            super::TAG_M2 => Container::RrcSetupComplete,
            super::TAG_M3 => Container::InitialUeMessage,
            super::TAG_M4 => Container::AuthenticationRequest,
            super::TAG_HO_M2 => Container::RrcReestablishmentComplete,
            super::TAG_HO_M3 => Container::DlInformationTransfer,
            super::TAG_ABORT => Container::AuthenticationReject,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Container::Sib1 => "SIB1",
            Container::RrcSetupComplete => "RRCSetupComplete",
            Container::InitialUeMessage => "InitialUEMessage",
            Container::AuthenticationRequest => "AuthenticationRequest",
            Container::RrcReestablishmentComplete => "RRCReestablishmentComplete",
            Container::DlInformationTransfer => "DLInformationTransfer",
            Container::AuthenticationReject => "AuthenticationReject",
        }
    }
}

/// `container (1) ‖ encoded message`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub container: Container,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.payload.len());
        out.push(self.container as u8);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let (&c, payload) = bytes.split_first().ok_or(WireError::Truncated)?;
        let container = Container::from_byte(c).ok_or(WireError::BadContainer(c))?;
        Ok(Self {
            container,
            payload: payload.to_vec(),
        })
    }
}

/// Encodes `msg` inside its designated container.
pub fn frame(msg: &Message) -> Result<Frame, WireError> {
    let container = Container::for_tag(msg.type_tag()).expect("every message has a carrier");
    Ok(Frame {
        container,
        payload: encode(msg)?,
    })
}

/// Decodes a frame's payload and checks it arrived in the right container.
pub fn unframe(frame: &Frame) -> Result<Message, WireError> {
    let msg = decode(&frame.payload)?;
    if Container::for_tag(msg.type_tag()) != Some(frame.container) {
        return Err(WireError::BadContainer(frame.container as u8));
    }
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_container() {
        assert_eq!(
            Frame::from_bytes(&[0x09, 0x7F]),
            Err(WireError::BadContainer(0x09))
        );
        assert_eq!(Frame::from_bytes(&[]), Err(WireError::Truncated));
    }

    #[test]
    fn abort_in_wrong_container() {
        let f = Frame {
            container: Container::Sib1,
            payload: vec![super::super::TAG_ABORT],
        };
        assert_eq!(unframe(&f), Err(WireError::BadContainer(0x01)));
        let good = frame(&Message::Abort).unwrap();
        assert_eq!(Frame::from_bytes(&good.to_bytes()).unwrap(), good);
        assert_eq!(unframe(&good).unwrap(), Message::Abort);
    }
}
