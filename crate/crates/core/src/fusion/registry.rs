use std::collections::BTreeMap;

use super::message::PredictionMessage;
use super::policy::DEFAULT_MATCH_RADIUS_M;
use super::record::CasualtyRecord;
use super::FusionError;

/// All casualty records, keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct CasualtyRegistry {
    records: BTreeMap<String, CasualtyRecord>,
    radius_m: f64,
    next_auto: usize,
}

impl Default for CasualtyRegistry {
    fn default() -> Self {
        Self::new(DEFAULT_MATCH_RADIUS_M)
    }
}

impl CasualtyRegistry {
    pub fn new(radius_m: f64) -> Self {
        Self { records: BTreeMap::new(), radius_m, next_auto: 1 }
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CasualtyRecord> {
        self.records.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut CasualtyRecord> {
        self.records.get_mut(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CasualtyRecord> {
        self.records.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut CasualtyRecord> {
        self.records.values_mut()
    }

    /// Register a casualty found at `position`, or return the existing record.
    pub fn locate(&mut self, id: &str, position: Option<[f64; 2]>, t: f64) -> &mut CasualtyRecord {
        let rec = self.records.entry(id.to_string()).or_insert_with(|| CasualtyRecord::new(id, t, position));
        rec.set_position_if_unknown(position);
        rec
    }

    /// Nearest record with a known position strictly within reach, ties to the
    /// smaller id.
    pub fn nearest(&self, p: [f64; 2]) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for rec in self.records.values() {
            let Some(q) = rec.position() else { continue };
            let d = (p[0] - q[0]).hypot(p[1] - q[1]);
            if d <= self.radius_m && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((rec.id(), d));
            }
        }
        best.map(|(id, _)| id)
    }

    /// Resolve the casualty a message is about, creating a record if none
    /// matches. Hints win over positions.
    pub fn match_casualty(&mut self, msg: &PredictionMessage) -> Result<String, FusionError> {
        if let Some(hint) = &msg.casualty {
            self.locate(hint, msg.position, msg.timestamp);
            return Ok(hint.clone());
        }
        let p = msg.position.ok_or_else(|| FusionError::NoPositionNoHint { sender: msg.source.clone() })?;
        if let Some(id) = self.nearest(p) {
            return Ok(id.to_string());
        }
        let id = self.fresh_id();
        self.locate(&id, Some(p), msg.timestamp);
        Ok(id)
    }

    fn fresh_id(&mut self) -> String {
        loop {
            let id = format!("auto-{}", self.next_auto);
            self.next_auto += 1;
            if !self.records.contains_key(&id) {
                return id;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triage::VitalField;

    fn at(x: f64, y: f64) -> PredictionMessage {
        PredictionMessage::label("cam", "", VitalField::HeadTrauma, 0, 1.0).without_hint().at_position([x, y])
    }

    #[test]
    fn hint_precedence() {
        let mut reg = CasualtyRegistry::default();
        reg.locate("c1", Some([0.0, 0.0]), 0.0);
        let msg = PredictionMessage::label("cam", "c7", VitalField::HeadTrauma, 0, 1.0).at_position([0.0, 0.0]);
        assert_eq!(reg.match_casualty(&msg).unwrap(), "c7");
        assert!(reg.get("c7").is_some());
    }

    #[test]
    fn nearest_within_radius() {
        let mut reg = CasualtyRegistry::new(2.0);
        reg.locate("far", Some([5.0, 0.0]), 0.0);
        reg.locate("near", Some([1.0, 0.0]), 0.0);
        assert_eq!(reg.match_casualty(&at(0.0, 0.0)).unwrap(), "near");
    }

    #[test]
    fn radius_exceeded_creates_new() {
        let mut reg = CasualtyRegistry::new(2.0);
        reg.locate("c1", Some([0.0, 0.0]), 0.0);
        let id = reg.match_casualty(&at(10.0, 10.0)).unwrap();
        assert_eq!(id, "auto-1");
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.match_casualty(&at(10.5, 10.0)).unwrap(), "auto-1");
    }

    #[test]
    fn no_position_no_hint() {
        let mut reg = CasualtyRegistry::default();
        let mut m = at(0.0, 0.0);
        m.position = None;
        assert!(matches!(reg.match_casualty(&m), Err(FusionError::NoPositionNoHint { .. })));
    }
}
