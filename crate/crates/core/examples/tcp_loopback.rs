//! One AKA with the UE and the network on opposite ends of a local TCP
//! socket, frames carried with a 4-byte length prefix.

use mvno_aka::harness::transport::loopback_aka;
use mvno_aka::harness::ScenarioConfig;

fn main() {
    let uid = loopback_aka(&ScenarioConfig::default()).unwrap();
    println!("UID record over TCP: {} bytes", uid.to_bytes().len());
}
