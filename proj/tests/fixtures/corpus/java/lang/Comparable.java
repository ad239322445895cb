package java.lang;

/**
 * This interface imposes a total ordering on the objects of each class that
 * implements it.
 */
public interface Comparable<T> {
    /**
     * Compares this object with the specified object for order.
     *
     * @param o the object to be compared.
     * @return a negative integer, zero, or a positive integer as this object
     *         is less than, equal to, or greater than the specified object.
     */
    public int compareTo(T o);
}
