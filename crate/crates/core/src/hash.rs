use sha2::{Digest, Sha256};

/// SHA-256 over a git-style blob envelope (`blob <len>\0<content>`), hex encoded.
pub fn git_style_sha256(content: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", content.len()).as_bytes());
    hasher.update(content);
    hex::encode(hasher.finalize())
}
