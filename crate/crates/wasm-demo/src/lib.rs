//! wasm-bindgen surface for the static page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

pub use demo::{BlockInfo, Decoded, Demo, Histogram};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(js_err)
}

#[wasm_bindgen(js_name = Demo)]
pub struct JsDemo(Demo);

#[wasm_bindgen(js_class = Demo)]
impl JsDemo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<JsDemo, JsError> {
        Demo::new().map(JsDemo).map_err(js_err)
    }

    /// Returns the three stored ciphertexts as decimal strings.
    pub fn register(&mut self, password: &str, phone: &str, lastname: &str, firstname: &str) -> Result<String, JsError> {
        let c = self.0.register(password, phone, lastname, firstname).map_err(js_err)?;
        json(&c.map(|c| c.to_string()))
    }

    /// `{"phone":..,"name":..}` or `null` before any registration.
    pub fn login(&self, password: &str) -> Result<String, JsError> {
        json(&self.0.login(password).map_err(js_err)?)
    }

    pub fn histogram(&self, samples: usize, buckets: usize) -> Result<String, JsError> {
        json(&self.0.phone_histogram(samples, buckets).map_err(js_err)?)
    }

    pub fn block(&self, firstname: &str) -> Result<String, JsError> {
        json(&self.0.firstname_block(firstname).map_err(js_err)?)
    }
}
