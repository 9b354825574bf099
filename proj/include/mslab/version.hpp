#ifndef MSLAB_VERSION_HPP
#define MSLAB_VERSION_HPP

#define MSLAB_VERSION "0.1.0"

#endif  // MSLAB_VERSION_HPP
