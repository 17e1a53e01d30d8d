fn main() {
    // Dense symmetric eigenvalues and rank-k updates go through the system
    // OpenBLAS (pthread build, LP64 interface).
    println!("cargo:rustc-link-lib=dylib=openblas");
}
