fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    cbindgen::Builder::new()
        .with_crate(".")
        .with_language(cbindgen::Language::C)
        .with_include_guard("CUPGATES_H")
        .generate()
        .expect("Unable to generate cupgates.h")
        .write_to_file("include/cupgates.h");
}
