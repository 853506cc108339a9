//! Vehicle configuration files.
//!
//! ```json
//! {
//!   "angle_unit": "rad",
//!   "units": [
//!     {"label": "tractor",
//!      "wheels": [{"x": 0, "y": 0, "label": "rear"}, {"x": 3, "y": 0, "label": "front"}],
//!      "hitch_front": null,
//!      "hitch_rear": {"x": -1, "y": 0}}
//!   ]
//! }
//! ```
//!
//! Coordinates are meters in each unit's body frame (x forward, y left).
//! `angle_unit` sets how angles and angular rates supplied alongside this
//! vehicle (initial states, control traces) are read; outputs are radians.

use serde::{Deserialize, Serialize};

use crate::vehicle::{Point, UnitSpec, VehicleSpec, WheelSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
}

impl AngleUnit {
    pub fn to_rad(&self, v: f64) -> f64 {
        match self {
            AngleUnit::Rad => v,
            AngleUnit::Deg => v.to_radians(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XyFile {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WheelFile {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitFile {
    #[serde(default)]
    pub label: String,
    pub wheels: Vec<WheelFile>,
    #[serde(default)]
    pub hitch_front: Option<XyFile>,
    #[serde(default)]
    pub hitch_rear: Option<XyFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfigFile {
    #[serde(default)]
    pub angle_unit: AngleUnit,
    pub units: Vec<UnitFile>,
}

fn point(p: &XyFile) -> Point {
    Point::new(p.x, p.y)
}

fn xy(p: &Point) -> XyFile {
    XyFile { x: p.x, y: p.y }
}

impl VehicleConfigFile {
    pub fn to_spec(&self) -> VehicleSpec {
        VehicleSpec {
            units: self
                .units
                .iter()
                .map(|u| UnitSpec {
                    wheels: u
                        .wheels
                        .iter()
                        .map(|w| WheelSpec { position: Point::new(w.x, w.y), label: w.label.clone() })
                        .collect(),
                    hitch_front: u.hitch_front.as_ref().map(point),
                    hitch_rear: u.hitch_rear.as_ref().map(point),
                    label: u.label.clone(),
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &VehicleSpec, angle_unit: AngleUnit) -> Self {
        VehicleConfigFile {
            angle_unit,
            units: spec
                .units
                .iter()
                .map(|u| UnitFile {
                    label: u.label.clone(),
                    wheels: u
                        .wheels
                        .iter()
                        .map(|w| WheelFile { x: w.position.x, y: w.position.y, label: w.label.clone() })
                        .collect(),
                    hitch_front: u.hitch_front.as_ref().map(xy),
                    hitch_rear: u.hitch_rear.as_ref().map(xy),
                })
                .collect(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<VehicleConfigFile, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn emit_config(cfg: &VehicleConfigFile) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::validate;

    const SEMI: &str = r#"{
        "angle_unit": "deg",
        "units": [
            {"label": "tractor", "wheels": [{"x": 0, "y": 0}, {"x": 3.5, "y": 0, "label": "steer"}],
             "hitch_rear": {"x": 0.3, "y": 0}},
            {"label": "trailer", "wheels": [{"x": 0.5, "y": 0}], "hitch_front": {"x": 10, "y": 0}}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = parse_config(SEMI).unwrap();
        assert_eq!(cfg.angle_unit, AngleUnit::Deg);
        let v = validate(&cfg.to_spec()).unwrap();
        let again = parse_config(&emit_config(&VehicleConfigFile::from_spec(v.spec(), cfg.angle_unit))).unwrap();
        assert_eq!(validate(&again.to_spec()).unwrap().spec(), v.spec());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = SEMI.replace("\"label\": \"tractor\"", "\"label\": \"tractor\", \"mass\": 9000");
        assert!(parse_config(&text).is_err());
        assert!(parse_config(r#"{"units": [], "angle_unit": "grad"}"#).is_err());
    }
}
