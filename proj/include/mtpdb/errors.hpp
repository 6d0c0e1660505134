#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtpdb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
    public:
    using std::runtime_error::runtime_error;
};

/// Malformed query text. `position` is a byte offset into the input.
class ParseError : public Error
{
    std::size_t position_;

    public:
    ParseError(const std::string &message, std::size_t position)
        : Error(message + " at offset " + std::to_string(position))
        , position_(position)
    { }

    std::size_t position() const { return position_; }
};

/// A query or data file is inconsistent with the schema (unknown predicate, arity mismatch, bad constant, ...).
class SchemaError : public Error
{
    public:
    using Error::Error;
};

/// Invalid arguments or input files.
class InvalidArgument : public Error
{
    public:
    using Error::Error;
};

/// Lifted inference hit its failure step: no rule applies and the query is #P-hard for lifted evaluation.
class UnsafeQuery : public Error
{
    public:
    using Error::Error;
};

/// The exact budgeted program could not decompose the query without inclusion-exclusion over the budgeted relation.
class NotInversionFree : public Error
{
    public:
    using Error::Error;
};

/// A configured resource guard (worlds, conjuncts, subsets, clauses) refused the computation.
class ResourceLimit : public Error
{
    public:
    using Error::Error;
};

}
