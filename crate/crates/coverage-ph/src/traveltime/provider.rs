//! Routing providers: the synthetic offline model and an HTTPS routes-API
//! adapter. Both return one-way durations in seconds; `None` means the mode
//! has no route for the pair (recorded as an absence, not an error).

use serde::{Deserialize, Serialize};

use crate::ingest::{haversine_km, Facility};

/// Travel mode for a single leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "car")]
    Car,
    #[serde(rename = "transit")]
    Transit,
    #[serde(rename = "walk")]
    Walk,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Car, Mode::Transit, Mode::Walk];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Car => "car",
            Mode::Transit => "transit",
            Mode::Walk => "walk",
        }
    }

    pub fn parse(token: &str) -> Option<Mode> {
        match token {
            "car" => Some(Mode::Car),
            "transit" => Some(Mode::Transit),
            "walk" => Some(Mode::Walk),
            _ => None,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A source of one-way travel durations.
pub trait RoutingProvider: Send + Sync {
    fn name(&self) -> &str;

    /// One-way duration in seconds from `origin` to `dest`, or `Ok(None)`
    /// when the mode is unsupported for the pair.
    fn one_way_seconds(
        &self,
        origin: &Facility,
        dest: &Facility,
        mode: Mode,
    ) -> Result<Option<f64>, String>;
}

/// Assumed straight-line speeds for the synthetic provider, km/h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpeeds {
    pub car_kmh: f64,
    pub transit_kmh: f64,
    pub walk_kmh: f64,
}

impl Default for ModeSpeeds {
    fn default() -> Self {
        ModeSpeeds {
            car_kmh: 65.0,
            transit_kmh: 30.0,
            walk_kmh: 5.0,
        }
    }
}

impl ModeSpeeds {
    fn for_mode(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Car => self.car_kmh,
            Mode::Transit => self.transit_kmh,
            Mode::Walk => self.walk_kmh,
        }
    }
}

/// Deterministic offline provider: duration is haversine distance at a fixed
/// per-mode speed. Useful for tests, demos, and fully reproducible runs.
#[derive(Debug, Clone, Default)]
pub struct SyntheticProvider {
    pub speeds: ModeSpeeds,
}

impl SyntheticProvider {
    pub fn new(speeds: ModeSpeeds) -> Self {
        SyntheticProvider { speeds }
    }
}

/// One-way synthetic duration in minutes: haversine / speed(mode) * 60.
pub fn synthetic_mode_time(a: &Facility, b: &Facility, mode: Mode, speeds: &ModeSpeeds) -> f64 {
    haversine_km((a.lat, a.lon), (b.lat, b.lon)) / speeds.for_mode(mode) * 60.0
}

impl RoutingProvider for SyntheticProvider {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn one_way_seconds(
        &self,
        origin: &Facility,
        dest: &Facility,
        mode: Mode,
    ) -> Result<Option<f64>, String> {
        Ok(Some(synthetic_mode_time(origin, dest, mode, &self.speeds) * 60.0))
    }
}

pub const DEFAULT_ROUTES_ENDPOINT: &str = "https://routes.googleapis.com/directions/v2:computeRoutes";

/// HTTPS adapter for a routes API that accepts origin/destination lat-lng and
/// a travel mode, and answers with a route duration. The request/response
/// shapes follow the Routes API v2 wire format; the endpoint is overridable
/// for testing.
pub struct HttpRoutesProvider {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpRoutesProvider {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(30))
            .build()
            .map_err(|e| format!("http client: {e}"))?;
        Ok(HttpRoutesProvider {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            client,
        })
    }

    /// Read the API key from `ROUTING_API_KEY`; `ROUTING_API_ENDPOINT`
    /// optionally redirects requests (stub servers, proxies).
    pub fn from_env() -> Result<Self, String> {
        let key = std::env::var("ROUTING_API_KEY")
            .map_err(|_| "ROUTING_API_KEY not set (required for the live provider)".to_string())?;
        let endpoint = std::env::var("ROUTING_API_ENDPOINT")
            .unwrap_or_else(|_| DEFAULT_ROUTES_ENDPOINT.to_string());
        Self::new(endpoint, key)
    }

    fn wire_mode(mode: Mode) -> &'static str {
        match mode {
            Mode::Car => "DRIVE",
            Mode::Transit => "TRANSIT",
            Mode::Walk => "WALK",
        }
    }

    pub fn request_body(origin: &Facility, dest: &Facility, mode: Mode) -> serde_json::Value {
        serde_json::json!({
            "origin": {"location": {"latLng": {"latitude": origin.lat, "longitude": origin.lon}}},
            "destination": {"location": {"latLng": {"latitude": dest.lat, "longitude": dest.lon}}},
            "travelMode": Self::wire_mode(mode),
        })
    }

    /// Extract the duration in seconds from a response body, `None` when the
    /// API found no route for the requested mode.
    pub fn parse_duration_seconds(body: &serde_json::Value) -> Result<Option<f64>, String> {
        let routes = match body.get("routes").and_then(|r| r.as_array()) {
            Some(routes) if !routes.is_empty() => routes,
            _ => return Ok(None),
        };
        let duration = routes[0]
            .get("duration")
            .and_then(|d| d.as_str())
            .ok_or_else(|| format!("response missing routes[0].duration: {body}"))?;
        let seconds: f64 = duration
            .strip_suffix('s')
            .unwrap_or(duration)
            .parse()
            .map_err(|e| format!("bad duration {duration:?}: {e}"))?;
        Ok(Some(seconds))
    }
}

impl RoutingProvider for HttpRoutesProvider {
    fn name(&self) -> &str {
        "routes-api"
    }

    fn one_way_seconds(
        &self,
        origin: &Facility,
        dest: &Facility,
        mode: Mode,
    ) -> Result<Option<f64>, String> {
        let response = self
            .client
            .post(&self.endpoint)
            .header("X-Goog-Api-Key", &self.api_key)
            .header("X-Goog-FieldMask", "routes.duration")
            .json(&Self::request_body(origin, dest, mode))
            .send()
            .map_err(|e| format!("request failed: {e}"))?;
        let status = response.status();
        let body: serde_json::Value = response
            .json()
            .map_err(|e| format!("bad response body: {e}"))?;
        if !status.is_success() {
            // A routability failure for one mode is an absence, not an error.
            if status.as_u16() == 404 {
                return Ok(None);
            }
            return Err(format!("http {status}: {body}"));
        }
        Self::parse_duration_seconds(&body)
    }
}
