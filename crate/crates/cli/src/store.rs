//! On-disk cache of `W_theta` sets and character polynomials as JSON.
//! Everything read back is re-verified by the library, so a corrupt or
//! stale file only costs a recomputation.

use std::fs;
use std::path::{Path, PathBuf};

use paramodular::characters::CharacterPolynomial;
use paramodular::context::Store;
use paramodular::IntMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

const VERSION: &str = "v1";

pub struct JsonStore {
    dir: PathBuf,
}

impl JsonStore {
    pub fn new(root: &Path) -> std::io::Result<Self> {
        let dir = root.join(VERSION);
        fs::create_dir_all(&dir)?;
        Ok(JsonStore { dir })
    }

    fn load<T: DeserializeOwned>(&self, name: &str) -> Option<T> {
        let text = fs::read(self.dir.join(name)).ok()?;
        serde_json::from_slice(&text).ok()
    }

    fn save<T: Serialize + ?Sized>(&self, name: &str, value: &T) {
        let Ok(bytes) = serde_json::to_vec(value) else {
            return;
        };
        let tmp = self.dir.join(format!("{name}.{}.tmp", std::process::id()));
        // A failed write leaves no cache entry, which is harmless.
        if fs::write(&tmp, bytes).is_ok() && fs::rename(&tmp, self.dir.join(name)).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}

impl Store for JsonStore {
    fn load_w(&self, p: u64, theta: u64) -> Option<Vec<IntMatrix>> {
        self.load(&format!("w-{p}-{theta}.json"))
    }

    fn save_w(&self, p: u64, theta: u64, w: &[IntMatrix]) {
        self.save(&format!("w-{p}-{theta}.json"), w);
    }

    fn load_character(&self, j: u32, k: u32) -> Option<CharacterPolynomial> {
        self.load(&format!("chi-{j}-{k}.json"))
    }

    fn save_character(&self, chi: &CharacterPolynomial) {
        self.save(&format!("chi-{}-{}.json", chi.j, chi.k), chi);
    }
}
